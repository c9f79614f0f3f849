#include "pathdep/registry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pathdep {

namespace {

struct ParsedSpec {
    std::string family;
    std::map<std::string, std::string> params;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

ParsedSpec parse_spec(const std::string& spec) {
    ParsedSpec out;
    const auto open = spec.find('(');
    if (open == std::string::npos) {
        out.family = trim(spec);
        return out;
    }
    const auto close = spec.rfind(')');
    if (close == std::string::npos || close < open)
        throw std::invalid_argument("malformed coefficient spec: " + spec);
    out.family = trim(spec.substr(0, open));
    const std::string body = spec.substr(open + 1, close - open - 1);
    std::stringstream ss(body);
    std::string item;
    std::size_t positional = 0;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            out.params["_" + std::to_string(positional++)] = item;
        } else {
            out.params[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
        }
    }
    return out;
}

double get_num(const ParsedSpec& p, const std::string& key, double fallback) {
    auto it = p.params.find(key);
    if (it == p.params.end()) return fallback;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::invalid_argument("bad numeric parameter '" + key + "' in spec");
    return v;
}

std::string get_str(const ParsedSpec& p, const std::string& key, const std::string& fb) {
    auto it = p.params.find(key);
    return it == p.params.end() ? fb : it->second;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Scalar link functions used by the pointwise families.
struct Link {
    enum Kind { Tanh, Sin, Linear } kind;
    double operator()(double u) const {
        switch (kind) {
            case Tanh: return std::tanh(u);
            case Sin: return std::sin(u);
            default: return u;
        }
    }
    double d1(double u) const {
        switch (kind) {
            case Tanh: {
                const double th = std::tanh(u);
                return 1.0 - th * th;
            }
            case Sin: return std::cos(u);
            default: return 1.0;
        }
    }
    double d2(double u) const {
        switch (kind) {
            case Tanh: {
                const double th = std::tanh(u);
                return -2.0 * th * (1.0 - th * th);
            }
            case Sin: return -std::sin(u);
            default: return 0.0;
        }
    }
    // max |g''| over the real line
    double d2_sup() const {
        switch (kind) {
            case Tanh: return 4.0 / (3.0 * std::sqrt(3.0));
            case Sin: return 1.0;
            default: return 0.0;
        }
    }
    bool bounded() const { return kind != Linear; }
};

Link link_from_name(const std::string& name) {
    if (name == "tanh") return Link{Link::Tanh};
    if (name == "sin") return Link{Link::Sin};
    if (name == "linear" || name == "id") return Link{Link::Linear};
    throw std::invalid_argument("unknown link function: " + name);
}

class ConstantFunctional final : public CoefficientFunctional {
public:
    ConstantFunctional(Shape shape, std::vector<double> entries, std::string name)
        : CoefficientFunctional(shape, std::move(name)), entries_(std::move(entries)) {
        analytic_vertical_ = analytic_horizontal_ = analytic_second_vertical_ = true;
        double fro = 0.0;
        for (double v : entries_) fro += v * v;
        fro = std::sqrt(fro);
        bounds_.sup_bound = fro;
        bounds_.growth_c = fro;
        bounds_.growth_kappa = 0.0;
        bounds_.lip_sup = 0.0;
        bounds_.lip_dinf = 0.0;
        bounds_.vderiv_bound = 0.0;
        bounds_.vderiv_lip_dinf = 0.0;
        bounds_.deriv_growth_c = 0.0;
    }

    void vertical_derivative(double, const PathView&, std::size_t, std::size_t,
                             std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
    void horizontal_derivative(double, const PathView&, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
    void second_vertical(double, const PathView&, std::size_t, std::size_t,
                         std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }

private:
    void eval_impl(double, const PathView&, std::span<double> out) const override {
        std::copy(entries_.begin(), entries_.end(), out.begin());
    }

    std::vector<double> entries_;
};

// entry(k,l) = scale * g(gain * x_k(t)); the workhorse state-dependent family.
class PointwiseFunctional final : public CoefficientFunctional {
public:
    PointwiseFunctional(Shape shape, Link link, double scale, double gain, std::string name)
        : CoefficientFunctional(shape, std::move(name)),
          link_(link),
          scale_(scale),
          gain_(gain) {
        analytic_vertical_ = analytic_horizontal_ = analytic_second_vertical_ = true;
        const double entries = std::sqrt(static_cast<double>(shape.count()));
        const double sg = std::abs(scale_ * gain_);
        if (link_.bounded()) {
            bounds_.sup_bound = std::abs(scale_) * entries;
            bounds_.growth_c = std::abs(scale_) * entries;
            bounds_.growth_kappa = 0.0;
        } else {
            bounds_.growth_c = std::abs(scale_) * entries;
            bounds_.growth_kappa = 1.0;
        }
        bounds_.lip_sup = sg * entries;
        bounds_.lip_dinf = sg * entries;
        bounds_.vderiv_bound = sg * entries;
        bounds_.vderiv_lip_dinf = std::abs(scale_) * gain_ * gain_ * link_.d2_sup() * entries;
        bounds_.deriv_growth_c = std::abs(scale_) * gain_ * gain_ * link_.d2_sup() * entries;
    }

    void vertical_derivative(double t, const PathView& x, std::size_t k, std::size_t,
                             std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        out[k] = scale_ * gain_ * link_.d1(gain_ * x.eval(t, k));
    }
    void horizontal_derivative(double, const PathView&, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
    void second_vertical(double t, const PathView& x, std::size_t k, std::size_t,
                         std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
        const std::size_t m = x.dim();
        out[k * m + k] = scale_ * gain_ * gain_ * link_.d2(gain_ * x.eval(t, k));
    }

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        const std::size_t cols = shape_.cols;
        for (std::size_t k = 0; k < shape_.rows; ++k) {
            const double v = scale_ * link_(gain_ * x.eval(t, k));
            for (std::size_t l = 0; l < cols; ++l) out[k * cols + l] = v;
        }
    }

    Link link_;
    double scale_;
    double gain_;
};

// entry(k,l) = int_0^t scale * g(gain * x_k(u)) du, reading the path as a
// left-continuous step function per grid cell. The value at t then carries
// zero quadrature weight, so vertical bumps at t leave the integral
// unchanged, and the one-sided time difference recovers the integrand at t
// exactly at grid times.
class IntegralFunctional final : public CoefficientFunctional {
public:
    IntegralFunctional(Shape shape, Link link, double scale, double gain, std::string name)
        : CoefficientFunctional(shape, std::move(name)),
          link_(link),
          scale_(scale),
          gain_(gain) {
        analytic_vertical_ = analytic_horizontal_ = analytic_second_vertical_ = true;
        const double entries = std::sqrt(static_cast<double>(shape.count()));
        if (link_.bounded()) {
            bounds_.sup_bound.reset();  // depends on T; growth form is used instead
            bounds_.growth_c = std::abs(scale_) * entries;  // per unit time
            bounds_.growth_kappa = 0.0;
        }
        bounds_.vderiv_bound = 0.0;
        bounds_.deriv_growth_c = std::abs(scale_) * entries;
    }

    void vertical_derivative(double, const PathView&, std::size_t, std::size_t,
                             std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
    void horizontal_derivative(double t, const PathView& x,
                               std::span<double> out) const override {
        const std::size_t cols = shape_.cols;
        for (std::size_t k = 0; k < shape_.rows; ++k) {
            const double v = scale_ * link_(gain_ * x.eval(t, k));
            for (std::size_t l = 0; l < cols; ++l) out[k * cols + l] = v;
        }
    }
    void second_vertical(double, const PathView&, std::size_t, std::size_t,
                         std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        const auto& pts = x.grid().points();
        const std::size_t cols = shape_.cols;
        for (std::size_t k = 0; k < shape_.rows; ++k) {
            double acc = 0.0;
            for (std::size_t i = 1; i < pts.size() && pts[i - 1] < t; ++i) {
                const double u = std::min(pts[i], t);
                acc += scale_ * link_(gain_ * x.value(i - 1, k)) * (u - pts[i - 1]);
            }
            if (t > pts.back())
                acc += scale_ * link_(gain_ * x.value(pts.size() - 1, k)) * (t - pts.back());
            for (std::size_t l = 0; l < cols; ++l) out[k * cols + l] = acc;
        }
    }

    Link link_;
    double scale_;
    double gain_;
};

// entry(k,l) = scale * g(gain * x_k((t - tau) v 0)). Not horizontally
// differentiable; vertical bumps at t never reach the lagged argument, so
// finite differences correctly report a zero vertical derivative.
class DelayedFunctional final : public CoefficientFunctional {
public:
    DelayedFunctional(Shape shape, Link link, double tau, double scale, double gain,
                      std::string name)
        : CoefficientFunctional(shape, std::move(name)),
          link_(link),
          tau_(tau),
          scale_(scale),
          gain_(gain) {
        if (!(tau_ > 0.0)) throw std::invalid_argument("delayed map needs tau > 0");
        horizontal_fd_ok_ = false;
        const double entries = std::sqrt(static_cast<double>(shape.count()));
        if (link_.bounded()) {
            bounds_.sup_bound = std::abs(scale_) * entries;
            bounds_.growth_c = std::abs(scale_) * entries;
            bounds_.growth_kappa = 0.0;
        }
        bounds_.lip_sup = std::abs(scale_ * gain_) * entries;
    }

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        const double u = std::max(t - tau_, 0.0);
        const std::size_t cols = shape_.cols;
        for (std::size_t k = 0; k < shape_.rows; ++k) {
            const double v = scale_ * link_(gain_ * x.eval(u, k));
            for (std::size_t l = 0; l < cols; ++l) out[k * cols + l] = v;
        }
    }

    Link link_;
    double tau_;
    double scale_;
    double gain_;
};

// entry(k) = scale * sup_{u <= t} |x_k(u)|. Kinked at the argmax, hence not
// vertically differentiable; the horizontal derivative vanishes.
class RunningSupFunctional final : public CoefficientFunctional {
public:
    RunningSupFunctional(Shape shape, double scale, std::string name)
        : CoefficientFunctional(shape, std::move(name)), scale_(scale) {
        vertical_fd_ok_ = false;
        analytic_horizontal_ = true;
        const double entries = std::sqrt(static_cast<double>(shape.count()));
        bounds_.growth_c = std::abs(scale_) * entries;
        bounds_.growth_kappa = 1.0;
        bounds_.lip_sup = std::abs(scale_) * entries;
        bounds_.lip_dinf = std::abs(scale_) * entries;
    }

    void horizontal_derivative(double, const PathView&, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        const auto& pts = x.grid().points();
        const std::size_t cols = shape_.cols;
        for (std::size_t k = 0; k < shape_.rows; ++k) {
            double sup = std::abs(x.eval(t, k));
            for (std::size_t i = 0; i < pts.size() && pts[i] <= t; ++i)
                sup = std::max(sup, std::abs(x.value(i, k)));
            for (std::size_t l = 0; l < cols; ++l) out[k * cols + l] = scale_ * sup;
        }
    }

    double scale_;
};

}  // namespace

FunctionalPtr make_functional(const std::string& spec, Shape shape) {
    const ParsedSpec p = parse_spec(spec);
    const std::string& fam = p.family;

    if (fam == "zero") return zero_functional(shape);

    if (fam == "constant") {
        std::vector<double> entries(shape.count(), 0.0);
        auto it = p.params.find("_0");
        std::string values = get_str(p, "value", it == p.params.end() ? "0" : it->second);
        values = get_str(p, "values", values);
        std::vector<double> parsed;
        std::stringstream ss(values);
        std::string tok;
        while (std::getline(ss, tok, '|')) parsed.push_back(std::stod(tok));
        if (parsed.size() == 1) {
            std::fill(entries.begin(), entries.end(), parsed[0]);
        } else if (parsed.size() == entries.size()) {
            entries = parsed;
        } else {
            throw std::invalid_argument("constant() needs 1 or rows*cols entries");
        }
        std::string joined;
        for (std::size_t i = 0; i < parsed.size(); ++i)
            joined += (i ? "|" : "") + fmt(parsed[i]);
        return std::make_shared<ConstantFunctional>(shape, std::move(entries),
                                                    "constant(" + joined + ")");
    }

    const double scale = get_num(p, "scale", get_num(p, "_0", 1.0));
    const double gain = get_num(p, "gain", 1.0);

    if (fam == "linear") {
        return std::make_shared<PointwiseFunctional>(
            shape, Link{Link::Linear}, scale, 1.0, "linear(scale=" + fmt(scale) + ")");
    }
    if (fam == "tanh" || fam == "sin") {
        return std::make_shared<PointwiseFunctional>(
            shape, link_from_name(fam), scale, gain,
            fam + "(scale=" + fmt(scale) + ", gain=" + fmt(gain) + ")");
    }
    if (fam == "integral") {
        const std::string inner = get_str(p, "inner", "linear");
        return std::make_shared<IntegralFunctional>(
            shape, link_from_name(inner), scale, gain,
            "integral(inner=" + inner + ", scale=" + fmt(scale) + ", gain=" + fmt(gain) + ")");
    }
    if (fam == "delayed") {
        const double tau = get_num(p, "tau", 0.1);
        const std::string inner = get_str(p, "inner", "tanh");
        return std::make_shared<DelayedFunctional>(
            shape, link_from_name(inner), tau, scale, gain,
            "delayed(tau=" + fmt(tau) + ", inner=" + inner + ", scale=" + fmt(scale) +
                ", gain=" + fmt(gain) + ")");
    }
    if (fam == "running_sup") {
        return std::make_shared<RunningSupFunctional>(shape, scale,
                                                      "running_sup(scale=" + fmt(scale) + ")");
    }
    throw std::invalid_argument("unknown coefficient family: " + fam);
}

std::string canonical_spec(const std::string& spec) {
    return make_functional(spec, Shape{1, 1})->name();
}

}  // namespace pathdep
