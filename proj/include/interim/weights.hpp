// Linear functionals: GammaVector weighs ex-post assignment coordinates
// (one entry per unit, each in [-1,1]); WeightVector weighs interim
// allocations (one entry per T* element, normalized so that
// |lambda(u,tau) / mu_u(tau)| <= 1, which makes the induced per-state
// weights land in [-1,1]^U).
#pragma once

#include "interim/instance.hpp"

#include <vector>

namespace interim {

struct GammaVector {
    std::vector<Rational> values;  // one per unit

    GammaVector() = default;
    explicit GammaVector(int num_units) : values(num_units, Rational(0)) {}
    Rational& operator[](int u) { return values[u]; }
    const Rational& operator[](int u) const { return values[u]; }
    int size() const { return static_cast<int>(values.size()); }

    bool in_box() const {
        for (const Rational& v : values)
            if (v < -1 || v > 1) return false;
        return true;
    }

    Rational dot(const std::vector<Rational>& rho) const {
        Rational s = 0;
        for (int u = 0; u < size(); ++u)
            if (values[u] != 0 && rho[u] != 0) s += values[u] * rho[u];
        return s;
    }
};

class WeightVector {
  public:
    WeightVector() = default;
    explicit WeightVector(int tstar_size) : values_(tstar_size, Rational(0)) {}

    Rational& operator[](int k) { return values_[k]; }
    const Rational& operator[](int k) const { return values_[k]; }
    int size() const { return static_cast<int>(values_.size()); }
    const std::vector<Rational>& values() const { return values_; }

    bool normalized(const Instance& inst) const {
        for (int k = 0; k < size(); ++k) {
            Rational r = values_[k] / inst.tstar_marginal(k);
            if (r < -1 || r > 1) return false;
        }
        return true;
    }

    // Rescale so the largest |lambda/mu| equals 1 (no-op on the zero vector).
    void normalize(const Instance& inst) {
        Rational peak = 0;
        for (int k = 0; k < size(); ++k) {
            Rational r = abs(values_[k]) / inst.tstar_marginal(k);
            if (r > peak) peak = r;
        }
        if (peak == 0) return;
        for (Rational& v : values_) v /= peak;
    }

    // lambda(Q) = sum over T* of lambda(u,tau) Q(u,tau).
    Rational apply(const InterimAllocation& q) const {
        Rational s = 0;
        for (int k = 0; k < size(); ++k)
            if (values_[k] != 0 && q[k] != 0) s += values_[k] * q[k];
        return s;
    }

    // Weights induced in a state: gamma(u) = lambda(u, t_u) / mu_u(t_u) for
    // each realized T* element's unit, zero elsewhere.
    GammaVector state_weights(int state, const Instance& inst) const {
        GammaVector gamma(inst.num_units());
        for (int k = 0; k < size(); ++k)
            if (inst.realized(k, state) && values_[k] != 0)
                gamma[inst.tstar_unit(k)] = values_[k] / inst.tstar_marginal(k);
        return gamma;
    }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

  private:
    std::vector<Rational> values_;
};

} // namespace interim
