#pragma once

#include <string>
#include <vector>

#include "rotforch/math.hpp"

namespace rotforch {

struct BoundViolation {
    std::string inequality;
    Vec3 point;
    double slack = 0.0;  // negative beyond tolerance
};

/// Outcome of a pointwise inequality sweep. `slack` is oriented so that the
/// inequality holds iff slack >= 0; entries are recorded when slack drops
/// below -tolerance. worst_slack is the minimum slack seen over all checks.
struct BoundReport {
    long samples_checked = 0;
    std::vector<BoundViolation> violations;
    double worst_slack = 0.0;

    void record(const std::string& id, const Vec3& p, double slack, double tol) {
        ++samples_checked;
        if (slack < worst_slack) worst_slack = slack;
        if (slack < -tol) violations.push_back({id, p, slack});
    }
    bool clean() const { return violations.empty(); }
};

}  // namespace rotforch
