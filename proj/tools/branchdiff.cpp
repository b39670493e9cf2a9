// branchdiff: batch front-end over the library modules.
// Subcommands: feller, qsd-approx, moments, sample-dist, qsd-numeric, compare, mc.
// CSV output uses 17 significant digits; JSON summaries echo the inputs.
// Exit codes: 0 success, 1 numerical failure, 2 config error.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "branchdiff/bgw.hpp"
#include "branchdiff/feller.hpp"
#include "branchdiff/qsd_density.hpp"
#include "branchdiff/qsd_moments.hpp"
#include "branchdiff/rates.hpp"

using nlohmann::json;
namespace bd = branchdiff;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "start:stop:step", strictly increasing, step > 0, stop reachable.
std::vector<double> parse_grid(const std::string& spec) {
    double start = 0.0, stop = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(is >> std::ws).eof())
        throw ConfigError("grid must be start:stop:step, got '" + spec + "'");
    if (!(step > 0.0) || !(stop > start))
        throw ConfigError("grid requires stop > start and step > 0");
    const long n = std::lround((stop - start) / step);
    if (std::fabs(start + n * step - stop) > 1e-9 * (std::fabs(stop) + 1.0))
        throw ConfigError("grid step does not divide the range");
    std::vector<double> xs(n + 1);
    for (long i = 0; i <= n; ++i)
        xs[i] = start + i * step;
    return xs;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV sink: --out path or stdout.
struct Csv {
    std::ofstream file;
    std::ostream* os = &std::cout;
    bool to_file = false;

    explicit Csv(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file)
                throw ConfigError("cannot open output file: " + path);
            os = &file;
            to_file = true;
        }
    }
    void header(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i)
            *os << (i ? "," : "") << names[i];
        *os << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            *os << (i ? "," : "") << fmt(vals[i]);
        *os << "\n";
    }
};

// JSON summary goes to stdout when the CSV went to a file, else to stderr.
void emit_summary(const json& j, const Csv& csv) {
    (csv.to_file ? std::cout : std::cerr) << j.dump(2) << "\n";
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<long>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<long>(i)) = v[i];
    return out;
}

Eigen::MatrixXd to_mat(const std::vector<double>& v) {
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (static_cast<std::size_t>(d) * d != v.size())
        throw ConfigError("matrix entries must form a square (row-major) list");
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = v[static_cast<std::size_t>(i) * d + j];
    return m;
}

// Shared model options for the small-theta commands: PIM via --pi, or a full
// row-stochastic P via --p (row-major).
struct ModelOpts {
    double theta = 0.0;
    std::vector<double> pi;
    std::vector<double> p;

    void attach(CLI::App* cmd) {
        cmd->add_option("--theta", theta, "scaled total mutation rate")->required();
        cmd->add_option("--pi", pi, "stationary type frequencies (parent-independent model)")
            ->delimiter(',');
        cmd->add_option("--p", p, "row-major mutant-type matrix P, rows sum to 1")
            ->delimiter(',');
    }
    bd::SmallThetaModel build() const {
        if (!pi.empty() && !p.empty())
            throw ConfigError("give either --pi or --p, not both");
        if (!pi.empty())
            return bd::SmallThetaModel::from_pim(theta, to_vec(pi));
        if (!p.empty())
            return bd::SmallThetaModel::from_p(theta, to_mat(p));
        throw ConfigError("model requires --pi or --p");
    }
    json echo() const {
        return json{{"theta", theta}, {"pi", pi}, {"p", p}};
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Quasi-stationary laws of branching diffusions: batch analyses"};
    app.require_subcommand(1);
    app.set_config("--config", "", "declarative config file, [section] per command; flags win");
    app.get_config_formatter_base()->valueSeparator('=');

    std::string out_path;
    std::uint64_t seed = 0;
    bool clip_negative = false;
    app.add_option("--out", out_path, "output path (default stdout)")->configurable(true);
    app.add_option("--seed", seed, "RNG seed")->configurable(true);
    app.add_flag("--clip-negative", clip_negative,
                 "clip negative small-theta density values to 0 in CSV output");

    // ---- feller ----
    auto* c_feller = app.add_subcommand(
        "feller", "single-type diffusion: transition density and limit laws; CSV (x,density,atom,p0)");
    double f_alpha = -0.5, f_t = 1.0;
    std::string f_grid = "0:8:0.01";
    std::string f_law = "transition";
    c_feller->add_option("--alpha", f_alpha, "drift parameter");
    c_feller->add_option("--t", f_t, "time")->check(CLI::PositiveNumber);
    c_feller->add_option("--x", f_grid, "grid start:stop:step");
    c_feller->add_option("--law", f_law, "transition|conditioned|qsd|yaglom|super|super-cond")
        ->check(CLI::IsMember({"transition", "conditioned", "qsd", "yaglom", "super", "super-cond"}));

    // ---- qsd-approx ----
    auto* c_approx = app.add_subcommand(
        "qsd-approx", "small-theta quasi-stationary density on a grid");
    ModelOpts a_model;
    a_model.attach(c_approx);
    double a_alpha = -0.5;
    int a_i = 0, a_j = 1;
    std::string a_mode = "surface-xu";
    std::string a_grid1 = "0.1:6:0.1", a_grid2 = "0.05:0.95:0.05";
    c_approx->add_option("--alpha", a_alpha, "drift parameter (< 0)");
    c_approx->add_option("--mode", a_mode, "line|surface|surface-xu")
        ->check(CLI::IsMember({"line", "surface", "surface-xu"}));
    c_approx->add_option("--i", a_i, "first type index");
    c_approx->add_option("--j", a_j, "second type index");
    c_approx->add_option("--x", a_grid1, "first coordinate grid start:stop:step");
    c_approx->add_option("--y", a_grid2, "second coordinate grid (x2, or u for surface-xu)");

    // ---- moments ----
    auto* c_moments = app.add_subcommand(
        "moments", "first and second quasi-stationary moments; JSON");
    double m_alpha = -0.5, m_theta = 0.0;
    std::vector<double> m_gamma, m_pi;
    std::string m_method = "solve";
    c_moments->add_option("--alpha", m_alpha, "drift parameter (< 0)");
    c_moments->add_option("--gamma", m_gamma, "row-major rate matrix, rows sum to 0")
        ->delimiter(',');
    c_moments->add_option("--theta", m_theta, "mutation rate (with --pi: parent-independent model)");
    c_moments->add_option("--pi", m_pi, "stationary frequencies")->delimiter(',');
    c_moments->add_option("--method", m_method, "solve|spectral|pim|both")
        ->check(CLI::IsMember({"solve", "spectral", "pim", "both"}));

    // ---- sample-dist ----
    auto* c_sample = app.add_subcommand(
        "sample-dist", "sampling distribution over type counts; CSV + JSON sum");
    ModelOpts s_model;
    s_model.attach(c_sample);
    int s_ntotal = 2;
    c_sample->add_option("--n-total", s_ntotal, "sample size")->check(CLI::PositiveNumber);

    // ---- qsd-numeric ----
    auto* c_numeric = app.add_subcommand(
        "qsd-numeric", "discrete branching-process QSD eigenvector, continuum-rescaled; CSV");
    double n_lambda = 0.975, n_alpha = -0.5, n_r12 = 0.0, n_r21 = 0.0;
    int n_mmax = 160;
    bool n_marginal = false;
    c_numeric->add_option("--lambda", n_lambda, "offspring mean")->check(CLI::PositiveNumber);
    c_numeric->add_option("--m-max", n_mmax, "population cutoff");
    c_numeric->add_option("--alpha", n_alpha, "continuum drift for the rescaling");
    c_numeric->add_option("--r12", n_r12, "per-offspring mutation probability 1 -> 2");
    c_numeric->add_option("--r21", n_r21, "per-offspring mutation probability 2 -> 1");
    c_numeric->add_flag("--marginal", n_marginal, "emit the total-population marginal only");

    // ---- compare ----
    auto* c_compare = app.add_subcommand(
        "compare", "discrete QSD vs small-theta density on the (x,u) grid; CSV + JSON verdict");
    double cp_theta = 0.1, cp_lambda = 0.975, cp_alpha = -0.5;
    std::vector<double> cp_pi{0.75, 0.25};
    int cp_mmax = 160;
    double cp_xmin = 0.5, cp_xmax = 6.0, cp_umin = 0.05, cp_umax = 0.95;
    c_compare->add_option("--theta", cp_theta, "scaled mutation rate")->check(CLI::PositiveNumber);
    c_compare->add_option("--pi", cp_pi, "stationary frequencies (2 types)")->delimiter(',');
    c_compare->add_option("--lambda", cp_lambda, "offspring mean (< 1)");
    c_compare->add_option("--m-max", cp_mmax, "population cutoff");
    c_compare->add_option("--alpha", cp_alpha, "continuum drift (< 0)");
    c_compare->add_option("--x-min", cp_xmin, "grid window");
    c_compare->add_option("--x-max", cp_xmax, "grid window");
    c_compare->add_option("--u-min", cp_umin, "grid window");
    c_compare->add_option("--u-max", cp_umax, "grid window");

    // ---- mc ----
    auto* c_mc = app.add_subcommand(
        "mc", "Monte Carlo branching-process replicates; JSON summary");
    double mc_lambda = 1.0, mc_ks_rate = 0.0, mc_r12 = 0.0, mc_r21 = 0.0;
    long mc_reps = 10000, mc_tau = 200;
    std::uint64_t mc_y0 = 1, mc_y20 = 0, mc_cap = 0;
    c_mc->add_option("--lambda", mc_lambda, "offspring mean")->check(CLI::PositiveNumber);
    c_mc->add_option("--reps", mc_reps, "number of replicates")->check(CLI::PositiveNumber);
    c_mc->add_option("--tau", mc_tau, "generations")->check(CLI::PositiveNumber);
    c_mc->add_option("--y0", mc_y0, "initial type-1 population");
    c_mc->add_option("--y20", mc_y20, "initial type-2 population");
    c_mc->add_option("--r12", mc_r12, "mutation probability 1 -> 2");
    c_mc->add_option("--r21", mc_r21, "mutation probability 2 -> 1");
    c_mc->add_option("--pop-cap", mc_cap, "population cap; hitting it counts as survival");
    c_mc->add_option("--ks-rate", mc_ks_rate,
                     "rate of the exponential reference for the Y(tau)/tau KS statistic "
                     "(default 2/sigma^2)");

    // shared flags (--out, --seed, ...) may appear after the subcommand name
    for (auto* sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*c_feller) {
        const auto xs = parse_grid(f_grid);
        Csv csv(out_path);
        csv.header({"x", "density", "atom", "p0"});
        for (double x : xs) {
            double dens = 0.0, atom = 0.0, p0 = 0.0;
            if (f_law == "transition" || f_law == "conditioned") {
                const auto [mu, beta] = bd::mu_beta(f_alpha, f_t);
                p0 = bd::extinction_prob(f_alpha, f_t);
                atom = (f_law == "transition") ? p0 : 0.0;
                dens = x > 0.0 ? bd::density_mixture(x, f_alpha, f_t)
                               : std::exp(-mu) * mu / beta; // x -> 0+ limit
                if (f_law == "conditioned")
                    dens /= 1.0 - p0;
            } else if (f_law == "qsd") {
                dens = bd::qsd_subcritical(x, f_alpha);
            } else if (f_law == "yaglom") {
                dens = bd::yaglom_critical(x);
            } else {
                const auto law =
                    bd::supercritical_stationary(x, f_alpha, f_law == "super-cond");
                dens = law.density;
                atom = law.atom;
                p0 = std::exp(-2.0 * f_alpha);
            }
            csv.row({x, dens, atom, p0});
        }
        return 0;
    }

    if (*c_approx) {
        const bd::SmallThetaModel model = a_model.build();
        if (!(a_alpha < 0.0))
            throw ConfigError("qsd-approx requires alpha < 0");
        const auto g1 = parse_grid(a_grid1);
        Csv csv(out_path);
        const auto emit = [&](double v) { return (clip_negative && v < 0.0) ? 0.0 : v; };
        if (a_mode == "line") {
            csv.header({"x", "density"});
            for (double x : g1) {
                Eigen::VectorXd pt = Eigen::VectorXd::Zero(model.d());
                pt(a_i) = x;
                csv.row({x, emit(bd::rescale_alpha(pt, a_alpha, model))});
            }
            return 0;
        }
        const auto g2 = parse_grid(a_grid2);
        if (a_mode == "surface") {
            csv.header({"x1", "x2", "density"});
            for (double x1 : g1)
                for (double x2 : g2) {
                    Eigen::VectorXd pt = Eigen::VectorXd::Zero(model.d());
                    pt(a_i) = x1;
                    pt(a_j) = x2;
                    csv.row({x1, x2, emit(bd::rescale_alpha(pt, a_alpha, model))});
                }
            return 0;
        }
        csv.header({"x", "u", "density"});
        for (double x : g1)
            for (double u : g2) {
                if (!(u > 0.0) || !(u < 1.0))
                    throw ConfigError("surface-xu requires u strictly inside (0,1)");
                Eigen::VectorXd pt = Eigen::VectorXd::Zero(model.d());
                pt(a_i) = x * u;
                pt(a_j) = x * (1.0 - u);
                csv.row({x, u, emit(x * bd::rescale_alpha(pt, a_alpha, model))});
            }
        return 0;
    }

    if (*c_moments) {
        if (!(m_alpha < 0.0))
            throw ConfigError("moments requires alpha < 0");
        std::unique_ptr<bd::RateMatrix> rates;
        Eigen::VectorXd pi;
        if (!m_gamma.empty()) {
            rates = std::make_unique<bd::RateMatrix>(to_mat(m_gamma));
            pi = bd::stationary_pi(*rates);
        } else if (!m_pi.empty() && m_theta > 0.0) {
            pi = to_vec(m_pi);
            rates = std::make_unique<bd::RateMatrix>(bd::pim(m_theta, pi));
        } else {
            throw ConfigError("moments requires --gamma, or --theta with --pi");
        }
        json j;
        j["input"] = {{"alpha", m_alpha}, {"gamma", m_gamma}, {"theta", m_theta},
                      {"pi", m_pi}, {"method", m_method}};
        const Eigen::VectorXd mu = bd::mean_vector(m_alpha, *rates);
        j["mu"] = std::vector<double>(mu.data(), mu.data() + mu.size());
        const auto pack = [](const Eigen::MatrixXd& m) {
            std::vector<std::vector<double>> rows;
            for (int r = 0; r < m.rows(); ++r)
                rows.emplace_back(m.row(r).begin(), m.row(r).end());
            return rows;
        };
        if (m_method == "solve") {
            j["mu2"] = pack(bd::second_moments_linear_solve(m_alpha, *rates));
        } else if (m_method == "spectral") {
            j["mu2"] = pack(bd::second_moments_spectral(m_alpha, *rates));
        } else if (m_method == "pim") {
            if (!(m_theta > 0.0) || m_pi.empty())
                throw ConfigError("method pim requires --theta and --pi");
            j["mu2"] = pack(bd::second_moments_pim(m_alpha, m_theta, pi));
        } else {
            const Eigen::MatrixXd a = bd::second_moments_linear_solve(m_alpha, *rates);
            const Eigen::MatrixXd b = bd::second_moments_spectral(m_alpha, *rates);
            j["mu2"] = pack(a);
            j["mu2_spectral"] = pack(b);
            double diff = 0.0;
            for (int r = 0; r < a.rows(); ++r)
                for (int s = 0; s < a.cols(); ++s)
                    diff = std::max(diff, std::fabs(a(r, s) - b(r, s)) / std::fabs(a(r, s)));
            j["max_rel_diff"] = diff;
        }
        if (out_path.empty()) {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream f(out_path);
            if (!f)
                throw ConfigError("cannot open output file: " + out_path);
            f << j.dump(2) << "\n";
        }
        return 0;
    }

    if (*c_sample) {
        const bd::SmallThetaModel model = s_model.build();
        const int d = model.d();
        Csv csv(out_path);
        std::vector<std::string> names;
        for (int i = 0; i < d; ++i)
            names.push_back("n" + std::to_string(i + 1));
        names.push_back("prob");
        names.push_back("clamped");
        csv.header(names);
        double sum = 0.0;
        long n_clamped = 0;
        std::vector<int> counts(d, 0);
        // enumerate all compositions of n_total into d nonnegative parts
        const std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == d - 1) {
                counts[pos] = left;
                const auto res = bd::sampling_distribution(counts, model);
                sum += res.value;
                n_clamped += res.clamped ? 1 : 0;
                std::vector<double> row(counts.begin(), counts.end());
                row.push_back(res.value);
                row.push_back(res.clamped ? 1.0 : 0.0);
                csv.row(row);
                return;
            }
            for (int k = 0; k <= left; ++k) {
                counts[pos] = k;
                rec(pos + 1, left - k);
            }
        };
        rec(0, s_ntotal);
        if (n_clamped > 0 && !clip_negative)
            std::cerr << "warning: " << n_clamped
                      << " probabilities clamped at 0 (outside the small-theta regime)\n";
        emit_summary(json{{"input", s_model.echo()}, {"n_total", s_ntotal},
                          {"sum", sum}, {"clamped", n_clamped}},
                     csv);
        return 0;
    }

    if (*c_numeric) {
        const bool two = c_numeric->count("--r12") || c_numeric->count("--r21");
        Eigen::MatrixXd r;
        if (two) {
            r.resize(2, 2);
            r << 1.0 - n_r12, n_r12, n_r21, 1.0 - n_r21;
        } else {
            r = Eigen::MatrixXd::Ones(1, 1);
        }
        const bd::DiscreteModel model(n_lambda, r, n_mmax);
        const bd::QsdVector qsd = bd::qsd_eigenvector(model);
        if (!qsd.converged)
            throw std::runtime_error("qsd-numeric: power iteration did not converge");
        const auto grid = bd::to_continuum(model, qsd, n_alpha);
        Csv csv(out_path);
        if (!two || n_marginal) {
            csv.header({"m", "x", "g_x"});
            for (const auto& s : grid.marginal)
                csv.row({static_cast<double>(s.m), s.x, s.value});
        } else {
            csv.header({"m", "i", "x", "u", "g_xu"});
            for (const auto& s : grid.surface)
                csv.row({static_cast<double>(s.m), static_cast<double>(s.i), s.x, s.u,
                         s.value});
        }
        emit_summary(json{{"extinction_mass", qsd.Pi}, {"iterations", qsd.iterations},
                          {"boundary_mass", qsd.boundary_mass}, {"dx", grid.dx}},
                     csv);
        return 0;
    }

    if (*c_compare) {
        if (cp_pi.size() != 2)
            throw ConfigError("compare supports two types");
        if (!(cp_alpha < 0.0) || !(cp_lambda < 1.0))
            throw ConfigError("compare requires alpha < 0 and lambda < 1");
        const double fac = std::log(cp_lambda) / cp_alpha;
        Eigen::MatrixXd r(2, 2);
        r(0, 1) = 0.5 * cp_theta * cp_pi[1] * fac;
        r(1, 0) = 0.5 * cp_theta * cp_pi[0] * fac;
        r(0, 0) = 1.0 - r(0, 1);
        r(1, 1) = 1.0 - r(1, 0);
        const bd::DiscreteModel dmodel(cp_lambda, r, cp_mmax);
        const bd::QsdVector qsd = bd::qsd_eigenvector(dmodel);
        if (!qsd.converged)
            throw std::runtime_error("compare: power iteration did not converge");
        const auto grid = bd::to_continuum(dmodel, qsd, cp_alpha);
        const bd::SmallThetaModel cmodel =
            bd::SmallThetaModel::from_pim(cp_theta, to_vec(cp_pi));

        Csv csv(out_path);
        csv.header({"m", "i", "x", "u", "g_numeric", "g_approx"});
        double l1_num = 0.0, l1_den = 0.0, sup = 0.0;
        for (const auto& s : grid.surface) {
            if (s.x < cp_xmin || s.x > cp_xmax || s.u < cp_umin || s.u > cp_umax)
                continue;
            const double approx = bd::g_surface_xu(0, 1, s.x, s.u, cmodel);
            csv.row({static_cast<double>(s.m), static_cast<double>(s.i), s.x, s.u,
                     s.value, approx});
            l1_num += std::fabs(s.value - approx);
            l1_den += std::fabs(s.value);
            if (s.value > 0.0)
                sup = std::max(sup, std::fabs(s.value - approx) / s.value);
        }
        if (l1_den == 0.0)
            throw std::runtime_error("compare: empty comparison window");
        const double l1 = l1_num / l1_den;
        const char* verdict = l1 <= 0.10 ? "agrees" : (l1 >= 0.30 ? "disagrees" : "marginal");
        emit_summary(json{{"input", {{"theta", cp_theta}, {"pi", cp_pi},
                                     {"lambda", cp_lambda}, {"m_max", cp_mmax},
                                     {"alpha", cp_alpha}}},
                          {"l1_rel", l1}, {"sup_rel", sup},
                          {"extinction_mass", qsd.Pi}, {"verdict", verdict}},
                     csv);
        return 0;
    }

    // mc
    {
        Eigen::MatrixXd r;
        const bool two = c_mc->count("--r12") || c_mc->count("--r21") || mc_y20 > 0;
        if (two) {
            r.resize(2, 2);
            r << 1.0 - mc_r12, mc_r12, mc_r21, 1.0 - mc_r21;
        } else {
            r = Eigen::MatrixXd::Ones(1, 1);
        }
        const bd::DiscreteModel model(mc_lambda, r, 2);
        bd::SimulateOptions opt;
        opt.tau_max = mc_tau;
        opt.pop_cap = mc_cap;
        const auto reps = bd::simulate(model, mc_y0, mc_y20, mc_reps, seed, opt);
        long survived = 0, capped = 0;
        std::vector<double> w; // Y(tau)/tau over full-length survivors
        for (const auto& rep : reps) {
            survived += rep.survived ? 1 : 0;
            capped += rep.capped ? 1 : 0;
            if (rep.survived && !rep.capped)
                w.push_back(static_cast<double>(rep.y) / static_cast<double>(mc_tau));
        }
        json j;
        j["input"] = {{"lambda", mc_lambda}, {"reps", mc_reps}, {"tau", mc_tau},
                      {"y0", mc_y0}, {"y20", mc_y20}, {"seed", seed},
                      {"pop_cap", mc_cap}};
        j["survived"] = survived;
        j["capped"] = capped;
        j["extinct_fraction"] =
            static_cast<double>(mc_reps - survived) / static_cast<double>(mc_reps);
        if (!w.empty()) {
            const double rate = mc_ks_rate > 0.0 ? mc_ks_rate : 2.0 / mc_lambda;
            j["ks_rate"] = rate;
            j["ks_exponential"] = bd::ks_distance(
                w, [rate](double x) { return -std::expm1(-rate * x); });
        }
        if (mc_lambda > 1.0) {
            const double alpha_hat =
                static_cast<double>(mc_y0 + mc_y20) * std::log(mc_lambda) / mc_lambda;
            j["alpha_matched"] = alpha_hat;
            j["extinct_fraction_expected"] = std::exp(-2.0 * alpha_hat);
        }
        if (out_path.empty()) {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream f(out_path);
            if (!f)
                throw ConfigError("cannot open output file: " + out_path);
            f << j.dump(2) << "\n";
        }
        return 0;
    }
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
}
