#include "funcnn/trainable.hpp"

#include <stdexcept>

namespace funcnn {

std::vector<Mat> gather_x(const CurveSet& data, const std::vector<int>& idx) {
    if (idx.empty()) throw std::invalid_argument("gather_x: empty index set");
    std::vector<Mat> out;
    out.reserve(data.x.size());
    for (const Mat& xr : data.x) {
        Mat sub(idx.size(), xr.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= xr.rows()) {
                throw std::invalid_argument("gather_x: index out of range");
            }
            sub.row(i) = xr.row(idx[i]);
        }
        out.push_back(std::move(sub));
    }
    return out;
}

Vec gather_y(const CurveSet& data, const std::vector<int>& idx) {
    if (idx.empty()) throw std::invalid_argument("gather_y: empty index set");
    Vec y(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= data.y.size()) {
            throw std::invalid_argument("gather_y: index out of range");
        }
        y(i) = data.y(idx[i]);
    }
    return y;
}

}  // namespace funcnn
