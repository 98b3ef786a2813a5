#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracvar/core_model.hpp"
#include "fracvar/errors.hpp"
#include "fracvar/special.hpp"

namespace fracvar {

KernelSpec KernelSpec::riemann_liouville(double order) {
    if (!(order > 0.0) || !(order <= 1.0)) {
        throw OrderError("Riemann-Liouville kernel order must lie in (0, 1]");
    }
    KernelSpec k(KernelFamily::RiemannLiouville, order);
    k.rl_scale_ = 1.0 / gamma_fn(order);
    return k;
}

KernelSpec KernelSpec::constant() { return KernelSpec(KernelFamily::Constant, 1.0); }

KernelSpec KernelSpec::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) {
        throw DomainError("tabulated kernel needs at least two samples");
    }
    if (!(samples.front().first > 0.0)) {
        throw DomainError("tabulated kernel samples must have s > 0");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!(samples[i].first > samples[i - 1].first)) {
            throw DomainError("tabulated kernel samples must be strictly increasing in s");
        }
    }
    for (const auto& [s, v] : samples) {
        if (!std::isfinite(s) || !std::isfinite(v)) {
            throw DomainError("tabulated kernel samples must be finite");
        }
    }
    KernelSpec k(KernelFamily::Tabulated, 0.0);
    k.samples_ = std::move(samples);
    return k;
}

KernelSpec KernelSpec::at_order(double order) const {
    if (family_ == KernelFamily::RiemannLiouville) {
        return riemann_liouville(order);
    }
    return *this;
}

double KernelSpec::operator()(double s) const {
    switch (family_) {
        case KernelFamily::RiemannLiouville:
            if (!(s > 0.0)) {
                throw DomainError("Riemann-Liouville kernel is singular at s <= 0");
            }
            return rl_scale_ * std::pow(s, order_ - 1.0);
        case KernelFamily::Constant:
            if (s < 0.0) {
                throw DomainError("constant kernel defined for s >= 0");
            }
            return 1.0;
        case KernelFamily::Tabulated: {
            const double lo = samples_.front().first;
            const double hi = samples_.back().first;
            if (s < lo || s > hi) {
                throw RangeError("tabulated kernel queried outside its sample range");
            }
            auto it = std::lower_bound(samples_.begin(), samples_.end(), s,
                                       [](const auto& p, double x) { return p.first < x; });
            if (it == samples_.begin()) return it->second;
            const auto& [s1, v1] = *it;
            const auto& [s0, v0] = *(it - 1);
            const double w = (s - s0) / (s1 - s0);
            return v0 + w * (v1 - v0);
        }
    }
    return 0.0;
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    switch (family_) {
        case KernelFamily::RiemannLiouville: os << "riemann_liouville(" << order_ << ")"; break;
        case KernelFamily::Constant: os << "constant"; break;
        case KernelFamily::Tabulated: os << "tabulated[" << samples_.size() << "]"; break;
    }
    return os.str();
}

double kernel_eval(const KernelSpec& kernel, double s) { return kernel(s); }

double kernel_l1_norm(const KernelSpec& kernel, double length) {
    switch (kernel.family()) {
        case KernelFamily::RiemannLiouville:
            return std::pow(length, kernel.order()) / gamma_fn(1.0 + kernel.order());
        case KernelFamily::Constant:
            return length;
        case KernelFamily::Tabulated: {
            const auto& s = kernel.samples();
            double acc = 0.0;
            for (std::size_t i = 1; i < s.size() && s[i - 1].first < length; ++i) {
                const double x1 = std::min(s[i].first, length);
                const double v1 = kernel(x1);
                acc += 0.5 * (x1 - s[i - 1].first) * (std::abs(s[i - 1].second) + std::abs(v1));
            }
            return acc;
        }
    }
    return 0.0;
}

}  // namespace fracvar
