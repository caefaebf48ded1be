#include "aoi/model.hpp"

namespace aoi {

void ModelParams::validate() const {
    if (!(lambda > 0.0) || lambda > 1.0)
        throw std::invalid_argument("lambda must be in (0, 1], got " + std::to_string(lambda));
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("p must be in [0, 1], got " + std::to_string(p));
    if (battery < 1)
        throw std::invalid_argument("battery must be >= 1, got " + std::to_string(battery));
    if (delta_max < 2)
        throw std::invalid_argument("delta_max must be >= 2, got " + std::to_string(delta_max));
    if (m < 1)
        throw std::invalid_argument("m must be >= 1, got " + std::to_string(m));
    if (!(theta > 0.0))
        throw std::invalid_argument("theta must be > 0, got " + std::to_string(theta));
}

} // namespace aoi
