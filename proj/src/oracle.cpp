// SPDX-License-Identifier: MIT
#include "preventix/oracle.hpp"

#include "preventix/error.hpp"
#include "preventix/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace preventix {

namespace {

constexpr int kBatches = 32;

McQuantity summarize(const std::vector<double>& batch_values, double overall, double reference) {
    const double nb = static_cast<double>(batch_values.size());
    double mean = 0.0;
    for (double v : batch_values) {
        mean += v;
    }
    mean /= nb;
    double ss = 0.0;
    for (double v : batch_values) {
        ss += (v - mean) * (v - mean);
    }
    McQuantity q;
    q.estimate = overall;
    q.std_error = std::sqrt(ss / (nb - 1.0) / nb);
    q.reference = reference;
    q.agrees = std::abs(q.estimate - q.reference) <= 3.0 * q.std_error;
    return q;
}

struct Cell {
    double e;
    double alpha;
    double value;
};

// Minimum of J over a rectangular grid. Expected premiums depend on alpha
// only (up to the factor p(e)), so they are tabulated once per row.
Cell scan(const Scenario& sc, const std::vector<double>& es, const std::vector<double>& as,
          std::vector<Cell>* profile) {
    const Severity& y = sc.mixture.severity;
    std::vector<double> eh(as.size());
    for (std::size_t j = 0; j < as.size(); ++j) {
        eh[j] = sc.premium.expected_h(y, as[j]);
    }
    Cell best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (double e : es) {
        const double p = sc.p(e);
        const double r = sc.rho(e);
        const double c = sc.mixture.cost(e);
        Cell col{e, 0.0, std::numeric_limits<double>::infinity()};
        for (std::size_t j = 0; j < as.size(); ++j) {
            const double v = p * eh[j] - as[j] * r + r + c;
            if (v < col.value) {
                col = {e, as[j], v};
            }
        }
        if (profile != nullptr) {
            profile->push_back(col);
        }
        if (col.value < best.value) {
            best = col;
        }
    }
    return best;
}

std::vector<double> window(double centre, double half, double lo, double hi, int n) {
    return numerics::linspace(std::max(lo, centre - half), std::min(hi, centre + half),
                              static_cast<std::size_t>(n));
}

std::vector<double> breakpoints(const Scenario& sc, DerivativeQuantity q) {
    std::vector<double> out;
    if (sc.is_tvar() && sc.e_beta() > 0.0) {
        out.push_back(sc.e_beta());
    }
    if (q == DerivativeQuantity::K) {
        try {
            std::string label;
            Thresholds t;
            Diagnostics d;
            decompose(sc, label, t, d);
            if (t.e_G1) {
                out.push_back(*t.e_G1);
            }
            if (t.e_G2) {
                out.push_back(*t.e_G2);
            }
        } catch (const Error&) {
        }
    }
    return out;
}

double closed_form_h_prime(const Scenario& sc, double e) {
    const auto& pr = sc.mixture.prevention;
    const Severity& y = sc.mixture.severity;
    const double k = y.k();
    const double xh = y.xhat();
    const double beta = sc.measure.beta();
    const double kappa = pr.cost.kappa();
    const double g1 = pr.p.gamma1();
    const double g2 = pr.p.gamma2();
    if (e < sc.e_beta()) {
        const double a = 2.0 * kappa * (k - 1.0) / xh * std::pow(1.0 - beta, 1.0 / k) *
                         std::pow(g1, -1.0 / k);
        const double m = 1.0 / k + 1.0;
        return -a * (std::pow(g2 + e, m) + e * m * std::pow(g2 + e, m - 1.0));
    }
    const double b = 2.0 * kappa * (k - 1.0) / (xh * k * g1) * (1.0 - beta);
    return -b * ((g2 + e) * (g2 + e) + 2.0 * e * (g2 + e));
}

}  // namespace

bool McReport::agrees() const {
    return mean.agrees && premium.agrees && weighted_loss.agrees && (!has_tvar || tvar.agrees);
}

TaskStream::TaskStream(std::uint64_t seed, double e, double alpha) {
    const auto eb = std::bit_cast<std::uint64_t>(e);
    const auto ab = std::bit_cast<std::uint64_t>(alpha);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(eb), static_cast<std::uint32_t>(eb >> 32),
                      static_cast<std::uint32_t>(ab), static_cast<std::uint32_t>(ab >> 32)};
    engine_.seed(seq);
}

double TaskStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double empirical_tvar(std::vector<double>& xs, double beta) {
    if (xs.empty()) {
        throw PreconditionError("empirical_tvar: no samples");
    }
    const auto n = xs.size();
    auto m = static_cast<std::size_t>(std::ceil((1.0 - beta) * static_cast<double>(n) - 1e-9));
    m = std::clamp<std::size_t>(m, 1, n);
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n - m), xs.end());
    double sum = 0.0;
    for (std::size_t i = n - m; i < n; ++i) {
        sum += xs[i];
    }
    return sum / static_cast<double>(m);
}

McReport mc_estimate(const Scenario& sc, double e, double alpha, std::size_t n,
                     std::uint64_t seed) {
    if (n < 10000) {
        throw PreconditionError("mc_estimate: need at least 10^4 samples");
    }
    McReport rep;
    rep.samples = n;
    rep.seed = seed;
    rep.e = e;
    rep.alpha = alpha;
    rep.has_tvar = sc.is_tvar();

    const std::size_t per = n / kBatches;
    const double p = sc.p(e);
    const Severity& y = sc.mixture.severity;
    TaskStream stream(seed, e, alpha);

    std::vector<double> xs(per * kBatches);
    std::vector<double> bm(kBatches), bh(kBatches), bw(kBatches), bt(kBatches);
    double sm = 0.0, sh = 0.0, sw = 0.0;
    for (int b = 0; b < kBatches; ++b) {
        double m = 0.0, h = 0.0, w = 0.0;
        for (std::size_t i = 0; i < per; ++i) {
            const double u1 = stream.uniform();
            const double u2 = stream.uniform();
            const double x = u1 < p ? y.sample(u2) : 0.0;
            xs[b * per + i] = x;
            m += x;
            h += sc.premium.h(alpha * x);
            w += x * sc.premium.h_prime(alpha * x);
        }
        sm += m;
        sh += h;
        sw += w;
        bm[b] = m / static_cast<double>(per);
        bh[b] = h / static_cast<double>(per);
        bw[b] = w / static_cast<double>(per);
        if (rep.has_tvar) {
            std::vector<double> chunk(xs.begin() + static_cast<std::ptrdiff_t>(b * per),
                                      xs.begin() + static_cast<std::ptrdiff_t>((b + 1) * per));
            bt[b] = empirical_tvar(chunk, sc.measure.beta());
        }
    }
    const double total = static_cast<double>(per * kBatches);
    rep.mean = summarize(bm, sm / total, sc.mixture.mean(e));
    rep.premium = summarize(bh, sh / total, premium(sc.premium, sc.mixture, e, alpha));
    rep.weighted_loss = summarize(bw, sw / total, weighted_loss(sc.premium, sc.mixture, e, alpha));
    if (rep.has_tvar) {
        rep.tvar = summarize(bt, empirical_tvar(xs, sc.measure.beta()), sc.rho(e));
    }
    return rep;
}

double coercive_effort_bound(const Scenario& sc) {
    return sc.mixture.prevention.cost.inverse(sc.rho(0.0));
}

GridResult grid_search(const Scenario& sc, double e_lo, double e_hi, int e_steps,
                       int alpha_steps) {
    if (!(e_hi >= e_lo) || e_steps < 2 || alpha_steps < 2) {
        throw PreconditionError("grid_search: empty grid");
    }
    const auto es = numerics::linspace(e_lo, e_hi, static_cast<std::size_t>(e_steps));
    const auto as = numerics::linspace(0.0, 1.0, static_cast<std::size_t>(alpha_steps));
    std::vector<Cell> profile;
    scan(sc, es, as, &profile);

    // Local minima of the e-profile, best four first.
    std::vector<Cell> seeds;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const bool l = i == 0 || profile[i].value < profile[i - 1].value;
        const bool r = i + 1 == profile.size() || profile[i].value <= profile[i + 1].value;
        if (l && r) {
            seeds.push_back(profile[i]);
        }
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const Cell& a, const Cell& b) { return a.value < b.value; });
    if (seeds.size() > 4) {
        seeds.resize(4);
    }

    const double de0 = es[1] - es[0];
    const double da0 = as[1] - as[0];
    GridResult out{0.0, 0.0, std::numeric_limits<double>::infinity(), de0, da0};
    for (Cell c : seeds) {
        double de = de0;
        double da = da0;
        for (int round = 0; round < 2; ++round) {
            const auto we = window(c.e, de, e_lo, e_hi, 21);
            const auto wa = window(c.alpha, da, 0.0, 1.0, 21);
            const Cell r = scan(sc, we, wa, nullptr);
            if (r.value <= c.value) {
                c = r;
            }
            de /= 10.0;
            da /= 10.0;
        }
        if (c.value < out.value || (c.value == out.value && c.e < out.e)) {
            out = {c.e, c.alpha, c.value, de, da};
        }
    }
    return out;
}

GridResult grid_search_moral_hazard(const Scenario& sc, int e_steps) {
    const auto b = admissible_set(sc);
    GridResult out{0.0, 1.0, constrained_objective(sc, 0.0), 0.0, 0.0};
    if (b.empty()) {
        return out;
    }
    double length = 0.0;
    for (const Interval& iv : b) {
        length += iv.hi - iv.lo;
    }
    const auto eval = [&](double e) {
        try {
            return constrained_objective(sc, e);
        } catch (const PreconditionError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    for (const Interval& iv : b) {
        const int n = std::max(3, static_cast<int>(e_steps * (iv.hi - iv.lo) / length));
        double step = (iv.hi - iv.lo) / (n - 1);
        double best_e = iv.lo;
        double best = eval(iv.lo);
        for (double e : numerics::linspace(iv.lo, iv.hi, static_cast<std::size_t>(n))) {
            const double v = eval(e);
            if (v < best) {
                best = v;
                best_e = e;
            }
        }
        for (int round = 0; round < 2; ++round) {
            for (double e : window(best_e, step, iv.lo, iv.hi, 21)) {
                const double v = eval(e);
                if (v < best) {
                    best = v;
                    best_e = e;
                }
            }
            step /= 10.0;
        }
        if (best < out.value) {
            out = {best_e, std::clamp(incentive_share(sc, best_e), 0.0, 1.0), best, step, 0.0};
        }
    }
    return out;
}

DerivativeReport derivative_check(const Scenario& sc, double e, DerivativeQuantity quantity,
                                  double rel_tol) {
    DerivativeReport rep;
    const double s = sc.scale();
    for (double bp : breakpoints(sc, quantity)) {
        if (std::abs(e - bp) < 1e-3 * s) {
            rep.inconclusive = true;
            rep.note = "effort within 1e-3 * scale of a breakpoint";
            return rep;
        }
    }
    numerics::ScalarFn f;
    switch (quantity) {
        case DerivativeQuantity::Rho:
            f = [&](double x) { return sc.rho(x); };
            rep.analytic = sc.rho_prime(e).right;
            break;
        case DerivativeQuantity::K: {
            f = [&](double x) { return k_objective(sc, x); };
            const double a = optimal_share(sc, e).alpha;
            // Envelope theorem: the share's own variation does not enter.
            rep.analytic = sc.mixture.p_prime(e) * sc.premium.expected_h(sc.mixture.severity, a) +
                           (1.0 - a) * sc.rho_prime(e).right + sc.mixture.cost_prime(e);
            break;
        }
        case DerivativeQuantity::L: {
            f = [&](double x) { return constrained_objective(sc, x); };
            const Severity& y = sc.mixture.severity;
            const double h = incentive_share(sc, e);
            double dh = 0.0;
            try {
                incentive_share_closed_form(sc, e);
                dh = closed_form_h_prime(sc, e);
            } catch (const UnsupportedMeasure&) {
                dh = numerics::richardson_derivative([&](double x) { return incentive_share(sc, x); },
                                                     e, 1e-4 * s, 0.0);
                rep.note = "H' by finite differences";
            }
            const double p = sc.p(e);
            rep.analytic = sc.rho_prime(e).right * (1.0 - h) - sc.rho(e) * dh +
                           sc.mixture.p_prime(e) * sc.premium.expected_h(y, h) +
                           p * dh * sc.premium.expected_y_h_prime(y, h) + sc.mixture.cost_prime(e);
            break;
        }
    }
    const double h1 = 1e-4 * s;
    const double h2 = 1e-5 * s;
    if (e - h1 < 0.0) {
        rep.numeric = numerics::richardson_derivative(f, e, h1, 0.0);
    } else {
        const auto central = [&](double h) { return (f(e + h) - f(e - h)) / (2.0 * h); };
        rep.numeric = (100.0 * central(h2) - central(h1)) / 99.0;
    }
    const double diff = std::abs(rep.analytic - rep.numeric);
    const double mag = std::max(std::abs(rep.analytic), std::abs(rep.numeric));
    rep.rel_error = mag > 0.0 ? diff / mag : 0.0;
    const double floor = rel_tol * (1.0 + std::abs(f(e))) / s;
    rep.agrees = diff <= rel_tol * mag + floor;
    return rep;
}

}  // namespace preventix
