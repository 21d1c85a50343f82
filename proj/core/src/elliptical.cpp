#include "esir/elliptical.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "esir/error.hpp"

namespace esir::elliptical {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double chi_norm(int p, Rng& rng) {
    double s = 0.0;
    for (int i = 0; i < p; ++i) {
        const double z = rng.normal();
        s += z * z;
    }
    return std::sqrt(s);
}

double logistic_radial_weight(double r) {
    const double e = std::exp(-r * r);
    return e / ((1.0 + e) * (1.0 + e));
}

// E(R^2) under density proportional to r^{p-1} g(r^2), by composite Simpson.
double logistic_second_moment(int p) {
    const double upper = 12.0 + std::sqrt(static_cast<double>(p));
    const int steps = 40000;
    const double h = upper / steps;
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double r = i * h;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double base = std::pow(r, p - 1) * logistic_radial_weight(r);
        den += w * base;
        num += w * base * r * r;
    }
    return num / den;
}

}  // namespace

void validate(const GeneratorKind& kind) {
    std::visit(overloaded{
                   [](const StudentT& t) {
                       if (!(t.nu > 0.0))
                           throw Error(ErrorCode::InvalidArgument, "StudentT requires nu > 0");
                   },
                   [](const FRatio& f) {
                       if (!(f.d1 > 0.0) || !(f.d2 > 0.0))
                           throw Error(ErrorCode::InvalidArgument, "FRatio requires d1, d2 > 0");
                   },
                   [](const auto&) {},
               },
               kind);
}

std::string name(const GeneratorKind& kind) {
    return std::visit(overloaded{
                          [](const Normal&) { return std::string("normal"); },
                          [](const StudentT& t) { return "t" + format_number(t.nu); },
                          [](const Cauchy&) { return std::string("cauchy"); },
                          [](const Laplace&) { return std::string("laplace"); },
                          [](const Logistic&) { return std::string("logistic"); },
                          [](const FRatio& f) {
                              return "F(" + format_number(f.d1) + "," + format_number(f.d2) + ")";
                          },
                      },
                      kind);
}

GeneratorKind parse_generator(const std::string& text, int p) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    GeneratorKind kind;
    try {
        if (s == "normal" || s == "gaussian") {
            kind = Normal{};
        } else if (s == "laplace") {
            kind = Laplace{};
        } else if (s == "logistic") {
            kind = Logistic{};
        } else if (s == "cauchy" || s == "t1") {
            kind = Cauchy{};
        } else if (s == "ec1") {
            kind = FRatio{static_cast<double>(p), 1.0};
        } else if (s.size() > 1 && s[0] == 't') {
            std::size_t used = 0;
            const double nu = std::stod(s.substr(1), &used);
            if (used != s.size() - 1) throw std::invalid_argument(s);
            kind = StudentT{nu};
        } else if (s.size() > 1 && s[0] == 'f') {
            const auto comma = s.find(',');
            if (comma == std::string::npos) throw std::invalid_argument(s);
            std::string a = s.substr(1, comma - 1);
            std::string b = s.substr(comma + 1);
            if (!a.empty() && a.front() == '(') a.erase(0, 1);
            if (!b.empty() && b.back() == ')') b.pop_back();
            kind = FRatio{std::stod(a), std::stod(b)};
        } else {
            throw std::invalid_argument(s);
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidArgument, "unknown distribution '" + text + "'");
    }
    validate(kind);
    return kind;
}

EllipticalSpec::EllipticalSpec(Vector mu, SymMatrix sigma, GeneratorKind generator)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), generator_(generator) {
    if (mu_.size() != sigma_.dim()) {
        throw Error(ErrorCode::InvalidArgument, "mu length differs from sigma dimension");
    }
    validate(generator_);
    factor_ = linalg::cholesky(sigma_);
}

void validate(const Dataset& d) {
    if (d.x.rows() < 2) throw Error(ErrorCode::InvalidArgument, "dataset needs n >= 2");
    if (d.x.cols() < 1) throw Error(ErrorCode::InvalidArgument, "dataset needs p >= 1");
    if (d.y.size() != d.x.rows()) throw Error(ErrorCode::InvalidArgument, "x and y row counts differ");
    if (!d.x.allFinite() || !d.y.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "dataset contains non-finite values");
    }
}

Vector sample_unit_sphere(int p, Rng& rng) {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
    Vector z(p);
    double norm = 0.0;
    do {
        for (int i = 0; i < p; ++i) z(i) = rng.normal();
        norm = z.norm();
    } while (norm == 0.0);
    return z / norm;
}

double logistic_scale(int p) {
    static std::mutex mutex;
    static std::map<int, double> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(p);
    if (it == cache.end()) {
        it = cache.emplace(p, std::sqrt(p / logistic_second_moment(p))).first;
    }
    return it->second;
}

double sample_generating_variable(const GeneratorKind& kind, int p, Rng& rng) {
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
    return std::visit(
        overloaded{
            [&](const Normal&) { return chi_norm(p, rng); },
            [&](const StudentT& t) {
                const double w = rng.chi_squared(t.nu);
                double xi = chi_norm(p, rng) * std::sqrt(t.nu / w);
                if (t.nu > 2.0) xi *= std::sqrt((t.nu - 2.0) / t.nu);
                return xi;
            },
            [&](const Cauchy&) {
                const double w = rng.chi_squared(1.0);
                return chi_norm(p, rng) / std::sqrt(w);
            },
            [&](const Laplace&) { return std::sqrt(rng.exponential()) * chi_norm(p, rng); },
            [&](const Logistic&) {
                const double scale = logistic_scale(p);
                // Gamma(p/2) envelope; acceptance probability 1/(1+e^-q)^2 >= 1/4.
                for (;;) {
                    const double q = rng.gamma(0.5 * p);
                    const double e = std::exp(-q);
                    if (rng.uniform() * (1.0 + e) * (1.0 + e) <= 1.0) return scale * std::sqrt(q);
                }
            },
            [&](const FRatio& f) {
                const double a = rng.chi_squared(f.d1) / f.d1;
                const double b = rng.chi_squared(f.d2) / f.d2;
                return a / b;
            },
        },
        kind);
}

Matrix sample_elliptical(const EllipticalSpec& spec, int n, Rng& rng) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    const int p = static_cast<int>(spec.dim());
    Matrix x(n, p);
    for (int i = 0; i < n; ++i) {
        const double xi = sample_generating_variable(spec.generator(), p, rng);
        const Vector u = sample_unit_sphere(p, rng);
        x.row(i) = (spec.mu() + xi * (spec.factor() * u)).transpose();
    }
    return x;
}

}  // namespace esir::elliptical
