#include "twogroups/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "twogroups/error.hpp"

namespace twogroups {

ConfusionCounts confusion(const DecisionVector& decisions, const std::vector<bool>& gamma) {
    if (decisions.size() != gamma.size()) throw DomainError("confusion: decision and truth lengths differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        const bool r = decisions.reject[i];
        if (gamma[i]) {
            (r ? c.S : c.T) += 1;
        } else {
            (r ? c.V : c.U) += 1;
        }
    }
    return c;
}

Estimate mean_and_se(std::vector<double> values) {
    Estimate e;
    e.reps = values.size();
    if (values.empty()) return e;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    e.value = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.value) * (v - e.value);
        e.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

MetricEstimates summarize(std::span<const ConfusionCounts> per_replicate, std::optional<double> oracle_mp) {
    if (per_replicate.empty()) throw DomainError("summarize: no replicates");
    std::vector<double> fdp, pfdp, mis, pow;
    fdp.reserve(per_replicate.size());
    mis.reserve(per_replicate.size());
    for (const ConfusionCounts& c : per_replicate) {
        fdp.push_back(c.fdp());
        mis.push_back(c.misclassified_fraction());
        if (c.R() > 0) pfdp.push_back(c.fdp());
        if (c.m1() > 0) pow.push_back(static_cast<double>(c.S) / static_cast<double>(c.m1()));
    }
    MetricEstimates out;
    out.reps = per_replicate.size();
    out.fdr = mean_and_se(std::move(fdp));
    out.mp = mean_and_se(std::move(mis));
    if (!pfdp.empty()) out.pfdr = mean_and_se(std::move(pfdp));
    if (!pow.empty()) out.power = mean_and_se(std::move(pow));
    if (oracle_mp && out.mp.value > 0.0) {
        Estimate e;
        e.value = *oracle_mp / out.mp.value;
        e.se = *oracle_mp * out.mp.se / (out.mp.value * out.mp.value);  // delta method
        e.reps = out.reps;
        out.efficiency = e;
    }
    return out;
}

}  // namespace twogroups
