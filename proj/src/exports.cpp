#include "aoi/exports.hpp"

#include <ostream>

#include "aoi/io.hpp"

namespace aoi {

std::string artifact_header(const std::string& config_json) {
    return std::string("# tool=") + kToolName + " version=" + kToolVersion +
           " config=" + config_json;
}

void write_policy_csv(std::ostream& out, const BeliefStateIndexer& idx,
                      std::span<const std::uint8_t> policy, const std::string& header) {
    out << header << "\n";
    out << "row,col,r,delta,action\n";
    for (int z = 0; z < idx.size(); ++z) {
        const auto s = idx.unflatten(z);
        out << s.row << ',' << s.col << ',' << s.r << ',' << s.delta << ','
            << static_cast<int>(policy[static_cast<size_t>(z)]) << "\n";
    }
}

void write_values_csv(std::ostream& out, const BeliefStateIndexer& idx,
                      std::span<const double> values, const std::string& header) {
    out << header << "\n";
    out << "row,col,r,delta,h\n";
    for (int z = 0; z < idx.size(); ++z) {
        const auto s = idx.unflatten(z);
        out << s.row << ',' << s.col << ',' << s.r << ',' << s.delta << ','
            << format_double(values[static_cast<size_t>(z)]) << "\n";
    }
}

void write_policy_grid_csv(std::ostream& out, const BeliefStateIndexer& idx,
                           std::span<const std::uint8_t> policy, int r,
                           const std::string& header) {
    out << header << "\n";
    out << "delta";
    for (int row = 0; row < idx.belief_rows(); ++row)
        for (int col = 0; col < idx.belief_cols(); ++col)
            out << ",\"(" << row << ',' << col << ")\"";
    out << "\n";
    for (int delta = 1; delta <= idx.delta_max(); ++delta) {
        out << delta;
        for (int bl = 0; bl < idx.belief_count(); ++bl)
            out << ',' << static_cast<int>(policy[static_cast<size_t>(idx.flatten(bl, r, delta))]);
        out << "\n";
    }
}

void write_thresholds_csv(std::ostream& out, const ThresholdProfile& profile,
                          const BeliefStateIndexer& idx, const std::string& header) {
    out << header << "\n";
    out << "row,col,threshold\n";
    for (int bl = 0; bl < idx.belief_count(); ++bl) {
        const int t = profile.threshold[static_cast<size_t>(bl)];
        out << bl / idx.belief_cols() << ',' << bl % idx.belief_cols() << ',';
        if (t == ThresholdProfile::kNever)
            out << "never";
        else
            out << t;
        out << "\n";
    }
}

void write_beliefs_csv(std::ostream& out, const TruncatedBeliefSpace& space,
                       const std::string& header) {
    out << header << "\n";
    space.write_csv(out);
}

} // namespace aoi
