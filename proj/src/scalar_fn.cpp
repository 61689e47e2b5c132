#include "nmago/scalar_fn.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "nmago/error.hpp"

namespace nmago {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

ScalarFn ScalarFn::power(double exponent, double scale) {
  require_finite(exponent, "power exponent");
  require_finite(scale, "power scale");
  ScalarFn fn(FnKind::Power);
  fn.a_ = exponent;
  fn.b_ = scale;
  return fn;
}

ScalarFn ScalarFn::exponential(double scale, double rate) {
  require_finite(scale, "exponential scale");
  require_finite(rate, "exponential rate");
  ScalarFn fn(FnKind::Exponential);
  fn.b_ = scale;
  fn.c_ = rate;
  return fn;
}

ScalarFn ScalarFn::affine(double slope, double intercept) {
  require_finite(slope, "affine slope");
  require_finite(intercept, "affine intercept");
  ScalarFn fn(FnKind::Affine);
  fn.a_ = slope;
  fn.b_ = intercept;
  return fn;
}

ScalarFn ScalarFn::constant(double value) {
  require_finite(value, "constant value");
  ScalarFn fn(FnKind::Constant);
  fn.a_ = value;
  return fn;
}

ScalarFn ScalarFn::power_singular(double exponent, double scale, std::optional<double> center) {
  require_finite(exponent, "singular exponent");
  require_finite(scale, "singular scale");
  if (center) require_finite(*center, "singular center");
  ScalarFn fn(FnKind::PowerSingular);
  fn.a_ = exponent;
  fn.b_ = scale;
  fn.center_ = center;
  return fn;
}

ScalarFn ScalarFn::tabulated(std::vector<double> xs, std::vector<double> ys) {
  ScalarFn fn(FnKind::Tabulated);
  fn.table_ = MonotoneCubic::pchip(xs, ys);
  fn.xs_ = std::move(xs);
  fn.ys_ = std::move(ys);
  return fn;
}

ScalarFn ScalarFn::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) throw DomainError("polynomial needs at least one coefficient");
  for (double c : coefficients) require_finite(c, "polynomial coefficient");
  ScalarFn fn(FnKind::Polynomial);
  fn.coeffs_ = std::move(coefficients);
  return fn;
}

Interval ScalarFn::domain() const {
  switch (kind_) {
    case FnKind::Power:
      return {0.0, kInf, true, true};
    case FnKind::PowerSingular:
      if (center_) return {-kInf, *center_, true, true};
      return {0.0, kInf, true, true};
    default:
      return {};
  }
}

double ScalarFn::operator()(double s) const {
  switch (kind_) {
    case FnKind::Power:
      return b_ * std::pow(s, a_);
    case FnKind::Exponential:
      return b_ * std::exp(c_ * s);
    case FnKind::Affine:
      return a_ * s + b_;
    case FnKind::Constant:
      return a_;
    case FnKind::PowerSingular:
      return b_ * std::pow(center_ ? *center_ - s : s, -a_);
    case FnKind::Tabulated:
      return table_(s);
    case FnKind::Polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
      return acc;
    }
  }
  return 0.0;
}

double ScalarFn::derivative(double s) const {
  switch (kind_) {
    case FnKind::Power:
      return a_ == 0.0 ? 0.0 : b_ * a_ * std::pow(s, a_ - 1.0);
    case FnKind::Exponential:
      return b_ * c_ * std::exp(c_ * s);
    case FnKind::Affine:
      return a_;
    case FnKind::Constant:
      return 0.0;
    case FnKind::PowerSingular:
      if (center_) return b_ * a_ * std::pow(*center_ - s, -a_ - 1.0);
      return -b_ * a_ * std::pow(s, -a_ - 1.0);
    case FnKind::Tabulated:
      return table_.derivative(s);
    case FnKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 1;) acc = acc * s + static_cast<double>(i) * coeffs_[i];
      return acc;
    }
  }
  return 0.0;
}

double ScalarFn::second_derivative(double s) const {
  switch (kind_) {
    case FnKind::Power:
      if (a_ == 0.0 || a_ == 1.0) return 0.0;
      return b_ * a_ * (a_ - 1.0) * std::pow(s, a_ - 2.0);
    case FnKind::Exponential:
      return b_ * c_ * c_ * std::exp(c_ * s);
    case FnKind::Affine:
    case FnKind::Constant:
      return 0.0;
    case FnKind::PowerSingular:
      return b_ * a_ * (a_ + 1.0) * std::pow(center_ ? *center_ - s : s, -a_ - 2.0);
    case FnKind::Tabulated:
      return table_.second_derivative(s);
    case FnKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 2;)
        acc = acc * s + static_cast<double>(i * (i - 1)) * coeffs_[i];
      return acc;
    }
  }
  return 0.0;
}

double ScalarFn::log_value(double s) const {
  switch (kind_) {
    case FnKind::Power:
      return std::log(b_) + a_ * std::log(s);
    case FnKind::Exponential:
      return std::log(b_) + c_ * s;
    case FnKind::PowerSingular:
      return std::log(b_) - a_ * std::log(center_ ? *center_ - s : s);
    default:
      return std::log((*this)(s));
  }
}

double ScalarFn::primitive(double s) const {
  switch (kind_) {
    case FnKind::Power:
      if (a_ == -1.0) return b_ * std::log(s);
      return b_ * std::pow(s, a_ + 1.0) / (a_ + 1.0);
    case FnKind::Exponential:
      if (c_ == 0.0) return b_ * s;
      return b_ / c_ * std::exp(c_ * s);
    case FnKind::Affine:
      return 0.5 * a_ * s * s + b_ * s;
    case FnKind::Constant:
      return a_ * s;
    case FnKind::PowerSingular:
      if (center_) {
        const double d = *center_ - s;
        if (a_ == 1.0) return -b_ * std::log(d);
        return b_ * std::pow(d, 1.0 - a_) / (a_ - 1.0);
      }
      if (a_ == 1.0) return b_ * std::log(s);
      return b_ * std::pow(s, 1.0 - a_) / (1.0 - a_);
    case FnKind::Tabulated:
      return table_.integral(0.0, s);
    case FnKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t i = coeffs_.size(); i-- > 0;)
        acc = acc * s + coeffs_[i] / static_cast<double>(i + 1);
      return acc * s;
    }
  }
  return 0.0;
}

std::optional<double> ScalarFn::primitive_at_zero() const {
  switch (kind_) {
    case FnKind::Power:
      if (a_ > -1.0) return 0.0;
      return std::nullopt;
    case FnKind::PowerSingular:
      if (center_) {
        if (*center_ <= 0.0) return std::nullopt;
        return primitive(0.0);
      }
      if (a_ < 1.0) return 0.0;
      return std::nullopt;
    default:
      return primitive(0.0);
  }
}

double ScalarFn::integral(double lo, double hi) const { return primitive(hi) - primitive(lo); }

double ScalarFn::log_integral_from_zero(double tau) const {
  if (kind_ == FnKind::Power && a_ > -1.0 && b_ > 0.0) {
    return std::log(b_ / (a_ + 1.0)) + (a_ + 1.0) * std::log(tau);
  }
  if (kind_ == FnKind::Exponential && c_ > 0.0 && b_ > 0.0) {
    return std::log(b_ / c_) + c_ * tau + std::log1p(-std::exp(-c_ * tau));
  }
  const auto zero = primitive_at_zero();
  if (!zero) throw DivergenceError("F undefined: integral of f diverges at 0");
  return std::log(primitive(tau) - *zero);
}

ScalarFn ScalarFn::scaled(double factor) const {
  require_finite(factor, "scale factor");
  ScalarFn out = *this;
  switch (kind_) {
    case FnKind::Power:
    case FnKind::Exponential:
    case FnKind::PowerSingular:
      out.b_ *= factor;
      break;
    case FnKind::Affine:
      out.a_ *= factor;
      out.b_ *= factor;
      break;
    case FnKind::Constant:
      out.a_ *= factor;
      break;
    case FnKind::Tabulated: {
      std::vector<double> ys = ys_;
      for (double& y : ys) y *= factor;
      return tabulated(xs_, std::move(ys));
    }
    case FnKind::Polynomial:
      for (double& c : out.coeffs_) c *= factor;
      break;
  }
  return out;
}

ScalarFn ScalarFn::with_argument_scale(double factor) const {
  require_finite(factor, "argument scale");
  if (!(factor > 0.0)) throw DomainError("argument scale must be positive");
  ScalarFn out = *this;
  switch (kind_) {
    case FnKind::Power:
      out.b_ *= std::pow(factor, a_);
      break;
    case FnKind::Exponential:
      out.c_ *= factor;
      break;
    case FnKind::Affine:
      out.a_ *= factor;
      break;
    case FnKind::Constant:
      break;
    case FnKind::PowerSingular:
      // scale (c - A s)^-g = scale A^-g (c/A - s)^-g
      out.b_ *= std::pow(factor, -a_);
      if (center_) out.center_ = *center_ / factor;
      break;
    case FnKind::Tabulated: {
      std::vector<double> xs = xs_;
      for (double& x : xs) x /= factor;
      return tabulated(std::move(xs), ys_);
    }
    case FnKind::Polynomial: {
      double f = 1.0;
      for (double& c : out.coeffs_) {
        c *= f;
        f *= factor;
      }
      break;
    }
  }
  return out;
}

std::string ScalarFn::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  switch (kind_) {
    case FnKind::Power:
      os << ':' << fmt_double(a_);
      if (b_ != 1.0) os << ',' << fmt_double(b_);
      break;
    case FnKind::Exponential:
      if (b_ != 1.0 || c_ != 1.0) os << ':' << fmt_double(b_) << ',' << fmt_double(c_);
      break;
    case FnKind::Affine:
      os << ':' << fmt_double(a_) << ',' << fmt_double(b_);
      break;
    case FnKind::Constant:
      os << ':' << fmt_double(a_);
      break;
    case FnKind::PowerSingular:
      os << ':' << fmt_double(a_) << ',' << fmt_double(b_);
      if (center_) os << ',' << fmt_double(*center_);
      break;
    case FnKind::Tabulated:
      os << "[" << xs_.size() << " nodes]";
      break;
    case FnKind::Polynomial:
      for (std::size_t i = 0; i < coeffs_.size(); ++i)
        os << (i == 0 ? ':' : ',') << fmt_double(coeffs_[i]);
      break;
  }
  return os.str();
}

bool operator==(const ScalarFn& lhs, const ScalarFn& rhs) {
  return lhs.kind_ == rhs.kind_ && lhs.a_ == rhs.a_ && lhs.b_ == rhs.b_ && lhs.c_ == rhs.c_ &&
         lhs.center_ == rhs.center_ && lhs.coeffs_ == rhs.coeffs_ && lhs.xs_ == rhs.xs_ &&
         lhs.ys_ == rhs.ys_;
}

std::string to_string(FnKind kind) {
  switch (kind) {
    case FnKind::Power:
      return "power";
    case FnKind::Exponential:
      return "exponential";
    case FnKind::Affine:
      return "affine";
    case FnKind::Constant:
      return "constant";
    case FnKind::PowerSingular:
      return "power_singular";
    case FnKind::Tabulated:
      return "tabulated";
    case FnKind::Polynomial:
      return "polynomial";
  }
  return "unknown";
}

FnKind fn_kind_from_string(const std::string& name) {
  for (FnKind k : {FnKind::Power, FnKind::Exponential, FnKind::Affine, FnKind::Constant,
                   FnKind::PowerSingular, FnKind::Tabulated, FnKind::Polynomial}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown function kind \"" + name + "\"");
}

ScalarFn parse_scalar_fn(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        params.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("bad numeric parameter \"" + item + "\" in \"" + text + "\"");
      }
    }
  }
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi) {
      throw ConfigError("wrong number of parameters for \"" + name + "\" in \"" + text + "\"");
    }
  };
  try {
    switch (fn_kind_from_string(name)) {
      case FnKind::Power:
        need(1, 2);
        return ScalarFn::power(params[0], params.size() > 1 ? params[1] : 1.0);
      case FnKind::Exponential:
        need(0, 2);
        return ScalarFn::exponential(params.size() > 0 ? params[0] : 1.0,
                                     params.size() > 1 ? params[1] : 1.0);
      case FnKind::Affine:
        need(2, 2);
        return ScalarFn::affine(params[0], params[1]);
      case FnKind::Constant:
        need(1, 1);
        return ScalarFn::constant(params[0]);
      case FnKind::PowerSingular:
        need(1, 3);
        return ScalarFn::power_singular(
            params[0], params.size() > 1 ? params[1] : 1.0,
            params.size() > 2 ? std::optional<double>(params[2]) : std::nullopt);
      case FnKind::Polynomial:
        need(1, 64);
        return ScalarFn::polynomial(params);
      case FnKind::Tabulated:
        throw ConfigError("tabulated functions are only accepted in a JSON config");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown function kind \"" + name + "\"");
}

}  // namespace nmago
