#pragma once

// Independent reference computations for tests. Nothing here calls the
// library kernels being checked.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "eegnet/model.hpp"
#include "eegnet/rng.hpp"
#include "eegnet/tensor.hpp"

namespace eegnet::test {

/// Direct summation with explicit zero padding.
inline std::vector<double> conv1d_oracle(const std::vector<double>& x, std::size_t cin, std::size_t len,
                                         const std::vector<double>& w, std::size_t cout, std::size_t k,
                                         const std::vector<double>& b, std::size_t stride, std::size_t pad) {
    const std::size_t lout = (len + 2 * pad - k) / stride + 1;
    std::vector<double> padded(cin * (len + 2 * pad), 0.0);
    for (std::size_t c = 0; c < cin; ++c) {
        for (std::size_t t = 0; t < len; ++t) padded[c * (len + 2 * pad) + t + pad] = x[c * len + t];
    }
    std::vector<double> y(cout * lout);
    for (std::size_t o = 0; o < cout; ++o) {
        for (std::size_t i = 0; i < lout; ++i) {
            double s = b[o];
            for (std::size_t c = 0; c < cin; ++c) {
                for (std::size_t j = 0; j < k; ++j) s += padded[c * (len + 2 * pad) + i * stride + j] * w[(o * cin + c) * k + j];
            }
            y[o * lout + i] = s;
        }
    }
    return y;
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.normal();
    return v;
}

inline Tensor random_tensor(Rng& rng, const Shape& shape, double scale = 1.0) {
    return Tensor(shape, random_vector(rng, shape_size(shape), scale));
}

/// |a - n| / max(|a|, |n|, floor). Central differences with h = 1e-6 carry
/// about 1e-10 of rounding noise, so below the floor the check is absolute.
inline double relative_error(double analytic, double numeric, double floor = 1e-3) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_kinks = 0;
};

/// Central differences of a scalar function on selected coordinates of a
/// mutable value array. `eval` returns the objective and the ReLU sign
/// pattern of the evaluation; coordinates whose +h/-h patterns differ cross a
/// kink and are skipped.
struct Evaluation {
    double value = 0.0;
    std::vector<bool> pattern;
};

inline GradCheckResult finite_difference_check(std::span<double> values, std::span<const double> analytic,
                                               const std::function<Evaluation()>& eval, Rng& rng,
                                               std::size_t coords = 20, double h = 1e-6) {
    GradCheckResult r;
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (idx.size() > coords) {
        rng.shuffle(std::span<std::size_t>(idx));
        idx.resize(coords);
    }
    for (auto i : idx) {
        const double saved = values[i];
        values[i] = saved + h;
        const Evaluation plus = eval();
        values[i] = saved - h;
        const Evaluation minus = eval();
        values[i] = saved;
        if (plus.pattern != minus.pattern) {
            ++r.skipped_kinks;
            continue;
        }
        const double numeric = (plus.value - minus.value) / (2.0 * h);
        r.max_rel_error = std::max(r.max_rel_error, relative_error(analytic[i], numeric));
        ++r.checked;
    }
    return r;
}

inline void append_pattern(std::vector<bool>& pattern, const Tensor& t) {
    for (double v : t.values()) pattern.push_back(v > 0.0);
}

inline std::vector<bool> model_pattern(const ModelCache& cache) {
    std::vector<bool> p;
    for (const auto& l : cache.layers) {
        append_pattern(p, l.output);
        if (l.hidden) append_pattern(p, *l.hidden);
    }
    return p;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct ModelGradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_kinks = 0;
};

/// Randomizes every parameter (including zero-initialized ones) so no
/// gradient path is trivially zero.
inline void randomize_parameters(Model& model, Rng& rng, double scale = 0.5) {
    for (auto& p : model.params()) {
        for (double& v : p.values()) v = scale * rng.normal();
    }
}

/// Checks sampled coordinates of every parameter tensor against central
/// differences of the projection sum(r * logits) for random x and r.
inline ModelGradCheck check_model_gradients(Model& model, std::uint64_t seed, std::size_t coords = 20) {
    Rng rng(seed, 99);
    const Tensor x = random_tensor(rng, {model.input_length()});
    const Tensor r = random_tensor(rng, {model.output_units()});
    const ForwardResult fwd = model_forward(model, x);
    const GradientSet grads = model_backward(model, fwd.cache, r);

    auto eval = [&]() {
        const ForwardResult f = model_forward(model, x);
        return Evaluation{dot(f.logits.values(), r.values()), model_pattern(f.cache)};
    };
    ModelGradCheck out;
    for (std::size_t p = 0; p < model.params().size(); ++p) {
        const auto res = finite_difference_check(model.params()[p].values(), grads.grads[p].values(), eval, rng, coords);
        out.max_rel_error = std::max(out.max_rel_error, res.max_rel_error);
        out.checked += res.checked;
        out.skipped_kinks += res.skipped_kinks;
    }
    return out;
}

}  // namespace eegnet::test
