#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qlat/boundary.hpp"
#include "qlat/cusp.hpp"
#include "qlat/hyperboloid.hpp"
#include "qlat/local_density.hpp"
#include "qlat/predict.hpp"
#include "qlat/qseries.hpp"
#include "qlat/weil.hpp"

using namespace qlat;

namespace {

struct Globals {
    unsigned long prime_bound = 100;
    int smax = 0;  // 0: per-prime default
    std::string order = "auto";
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string fmt(const BigFloat& x) { return format_decimal(x, 12); }

std::string quote_free(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n') c = ' ';
    return s;
}

/// "# qlat <sub> --a=x --b=y ..." with every option of the app and the subcommand, given or defaulted.
std::string header(const CLI::App& app, const CLI::App& sub) {
    std::ostringstream os;
    os << "# qlat " << sub.get_name();
    auto emit = [&](const CLI::App& a) {
        for (const CLI::Option* opt : a.get_options()) {
            if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
            std::string value;
            if (opt->count()) {
                for (std::size_t i = 0; i < opt->results().size(); ++i) value += (i ? " " : "") + opt->results()[i];
            } else {
                value = opt->get_default_str();
            }
            os << ' ' << opt->get_name() << '=' << (value.empty() ? "<unset>" : value);
        }
    };
    emit(app);
    emit(sub);
    return os.str();
}

Element parse_gamma(const FiniteQuadraticModule& d, const std::string& text) {
    if (text.find(',') == std::string::npos) {
        long idx = std::stol(text);
        if (idx < 0 || static_cast<std::size_t>(idx) >= d.order()) fail(ErrorKind::InvalidInput, "gamma index out of range");
        return d.element(static_cast<std::size_t>(idx));
    }
    Element g;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) g.push_back(std::stoll(item));
    d.check_element(g);
    return g;
}

std::string residues(const Element& g) {
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) s += (i ? " " : "") + std::to_string(g[i]);
    return s.empty() ? "0" : s;
}

/// Rows separated by ';', entries by spaces or commas.
IntMatrix parse_rows(const std::string& text, std::size_t pad_to) {
    std::vector<std::vector<Integer>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        for (auto& c : row)
            if (c == ',') c = ' ';
        std::stringstream rs(row);
        std::vector<Integer> r;
        std::string tok;
        while (rs >> tok) r.emplace_back(tok);
        if (r.empty()) continue;
        if (r.size() > pad_to) fail(ErrorKind::InvalidInput, "row longer than " + std::to_string(pad_to));
        r.resize(pad_to, Integer(0));
        rows.push_back(r);
    }
    if (rows.empty()) fail(ErrorKind::InvalidInput, "no rows given");
    IntMatrix m(rows.size(), pad_to);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < pad_to; ++j) m(i, j) = rows[i][j];
    return m;
}

std::string matrix_text(const IntMatrix& m) {
    std::string s;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) s += ';';
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? " " : "") + m(i, j).get_str();
    }
    return s;
}

Rational theta_order(const Globals& g, const Rational& fallback) {
    if (g.order == "auto") return fallback;
    return parse_rational(g.order);
}

std::optional<int> smax_of(const Globals& g) {
    if (g.smax <= 0) return std::nullopt;
    return g.smax;
}

std::string factor_list(const SingularSeries& ss) {
    std::string s;
    for (const auto& [p, r] : ss.factors) {
        if (!s.empty()) s += ' ';
        s += std::to_string(p) + ":" + to_string(r.density);
    }
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice counting, local densities and Heegner-type predictions"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--prime-bound", g.prime_bound, "primes p <= P in singular series")->capture_default_str();
    app.add_option("--smax", g.smax, "upper exponent for density stabilization (0 = default rule)")->capture_default_str();
    app.add_option("--order", g.order, "q-series truncation order")->capture_default_str();
    app.add_option("--seed", g.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--workers", g.workers, "Monte Carlo workers")->capture_default_str();
    app.fallthrough();

    std::string lattice_spec = "U+U+rank1(-2)";
    auto add_lattice = [&](CLI::App* s) { s->add_option("--lattice", lattice_spec, "lattice file or expression")->capture_default_str(); };

    auto* c_lattice = app.add_subcommand("lattice", "basic invariants");
    add_lattice(c_lattice);
    bool as_json = false;
    c_lattice->add_flag("--json", as_json, "print the lattice file instead");

    auto* c_fqm = app.add_subcommand("fqm", "discriminant module");
    add_lattice(c_fqm);
    bool show_iso = false;
    c_fqm->add_flag("--isotropic", show_iso, "list isotropic subgroups");

    auto* c_weil = app.add_subcommand("weil", "Weil representation matrices");
    add_lattice(c_weil);

    auto* c_theta = app.add_subcommand("theta", "theta series of a negative definite lattice");
    add_lattice(c_theta);

    auto* c_cusp = app.add_subcommand("cusp", "isotropic planes and their data");
    add_lattice(c_cusp);
    int cusp_bound = 1;
    c_cusp->add_option("--bound", cusp_bound, "coefficient box for isotropic vectors")->capture_default_str();

    std::string gamma_text = "0";
    std::string n_text = "1";
    auto* c_density = app.add_subcommand("density", "local densities");
    add_lattice(c_density);
    c_density->add_option("--gamma", gamma_text, "index or comma separated residues")->capture_default_str();
    c_density->add_option("--n", n_text, "exponent a/b")->capture_default_str();
    unsigned long prime = 0;
    c_density->add_option("--prime", prime, "single prime (0 = all primes of the singular series)")->capture_default_str();

    auto* c_eis = app.add_subcommand("eis", "Eisenstein coefficients");
    add_lattice(c_eis);
    c_eis->add_option("--gamma", gamma_text, "index, residues, or 'all'")->capture_default_str();
    std::string nmax_text = "3";
    c_eis->add_option("--nmax", nmax_text, "largest exponent")->capture_default_str();

    auto* c_count = app.add_subcommand("count", "lattice points in a window against the prediction");
    add_lattice(c_count);
    c_count->add_option("--gamma", gamma_text, "index or comma separated residues")->capture_default_str();
    std::string rho_text = "1", nmin_text = "40", nmax_count = "60";
    c_count->add_option("--rho", rho_text, "cap radius")->capture_default_str();
    c_count->add_option("--nmin", nmin_text)->capture_default_str();
    c_count->add_option("--nmax", nmax_count)->capture_default_str();
    std::uint64_t samples = 1000000;
    double eps = 1e-3;
    c_count->add_option("--samples", samples, "Monte Carlo samples per measure")->capture_default_str();
    c_count->add_option("--eps", eps, "shell half width for mu_infty")->capture_default_str();

    std::string mu_text = "1";
    auto* c_predict = app.add_subcommand("predict", "main term and boundary correction");
    add_lattice(c_predict);
    c_predict->add_option("--gamma", gamma_text)->capture_default_str();
    c_predict->add_option("--n", n_text)->capture_default_str();
    c_predict->add_option("--mu-s", mu_text, "mass mu(S)")->capture_default_str();
    std::string boundary_text;
    c_predict->add_option("--boundary", boundary_text, "designated cusps as index:degree,... (indices from `cusp`)")->capture_default_str();
    c_predict->add_option("--cusp-bound", cusp_bound, "coefficient box used to list cusps")->capture_default_str();

    auto* c_k3 = app.add_subcommand("k3", "K3 lattice polarization predictions");
    long k3_d = 1;
    std::string p_rows_text;
    c_k3->add_option("--d", k3_d, "P = rank1(2d) embedded as e + d f")->capture_default_str();
    c_k3->add_option("--p-rows", p_rows_text, "basis of P in K3 coordinates, rows ';' separated")->capture_default_str();
    c_k3->add_option("--gamma", gamma_text, "class in D(P)")->capture_default_str();
    c_k3->add_option("--n", n_text)->capture_default_str();
    c_k3->add_option("--mu-s", mu_text)->capture_default_str();
    std::string census_text;
    c_k3->add_option("--census-nmax", census_text, "also print the census up to this bound")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    const CLI::App* sub = app.get_subcommands().front();
    std::ostream& out = std::cout;

    try {
        out << header(app, *sub) << '\n';
        const BigFloat mu_s(mu_text);

        if (sub == c_k3) {
            IntMatrix rows = p_rows_text.empty() ? k3_rank_one_embedding(k3_d) : parse_rows(p_rows_text, 22);
            K3Setup s = k3_setup(rows);
            out << "# P gram " << matrix_text(s.p.gram()) << " ; |D(P)| = " << s.dp.order() << '\n';
            if (!census_text.empty()) {
                CensusReport c = elliptic_census_prediction(s, parse_rational(census_text), mu_s, g.prime_bound);
                out << "# census" << (c.heuristic ? " heuristic (local representability)" : "") << " total " << fmt(c.total) << '\n';
                out << "gamma_p,s,value\n";
                for (const auto& t : c.terms) out << t.gamma << ',' << to_string(t.s) << ',' << fmt(t.value) << '\n';
                return 0;
            }
            Element gp = parse_gamma(s.dp, gamma_text);
            K3Report r = k3_predict(s, gp, parse_rational(n_text), mu_s, g.prime_bound);
            const char* par = r.parabolic == Representability::Yes ? "yes" : r.parabolic == Representability::No ? "no" : "local_only";
            out << "gamma_p,gamma_v,n,exponent,predicted,parabolic,prime_bound,note\n";
            out << s.dp.index(gp) << ',' << r.gamma_v << ',' << n_text << ',' << to_string(r.exponent) << ',' << fmt(r.prediction.value)
                << ',' << par << ',' << g.prime_bound << ',' << quote_free(r.prediction.note) << '\n';
            return 0;
        }

        const IntegerLattice v = load_lattice(lattice_spec);
        const FiniteQuadraticModule d(v);

        if (sub == c_lattice) {
            if (as_json) {
                out << lattice_to_json(v) << '\n';
                return 0;
            }
            Signature sig = signature(v);
            out << "key,value\n";
            out << "name," << quote_free(v.name()) << '\n';
            out << "rank," << v.rank() << '\n';
            out << "signature_positive," << sig.positive << '\n';
            out << "signature_negative," << sig.negative << '\n';
            out << "determinant," << v.determinant().get_str() << '\n';
            out << "gram," << matrix_text(v.gram()) << '\n';
            if (v.hyperbolic_split())
                out << "hyperbolic_split," << v.hyperbolic_split()->first << ' ' << v.hyperbolic_split()->second << '\n';
        } else if (sub == c_fqm) {
            out << d.dump();
            if (show_iso) {
                out << "subgroup,size,maximal,members\n";
                auto subs = isotropic_subgroups(d);
                for (std::size_t i = 0; i < subs.size(); ++i) {
                    out << i << ',' << subs[i].size() << ',' << (subs[i].maximal ? 1 : 0) << ',';
                    for (std::size_t k = 0; k < subs[i].members.size(); ++k) out << (k ? " " : "") << subs[i].members[k];
                    out << '\n';
                }
            }
        } else if (sub == c_weil) {
            WeilAction w(d);
            RelationReport rel = verify_relations(w, 1e-9);
            out << "# relations unitarity=" << fmt(rel.unitarity) << " braid=" << fmt(rel.braid) << " t_order=" << fmt(rel.t_order)
                << '\n';
            out << "# T\n" << dump(w.T()) << "# S\n" << dump(w.S());
        } else if (sub == c_theta) {
            out << theta_series(d, theta_order(g, Rational(4))).csv();
        } else if (sub == c_cusp) {
            auto planes = find_isotropic_planes(d, cusp_bound);
            out << "index,plane,imprimitivity,kf_gram,strongly_primitive,brieskorn_holds\n";
            for (std::size_t i = 0; i < planes.size(); ++i) {
                const CuspDatum& f = planes[i];
                out << i << ',' << matrix_text(f.plane) << ',' << f.imprimitivity.get_str() << ',' << matrix_text(f.kf.gram()) << ','
                    << (f.strongly_primitive ? 1 : 0) << ',' << (f.brieskorn_holds ? 1 : 0) << '\n';
            }
        } else if (sub == c_density) {
            Element gamma = parse_gamma(d, gamma_text);
            const Rational n = parse_rational(n_text);
            DensityEngine engine(d, gamma);
            std::vector<LocalDensityReport> reports;
            if (prime) {
                reports.push_back(engine.local_density(n, prime, smax_of(g)));
            } else {
                SingularSeries ss = engine.singular_series(n, g.prime_bound);
                out << "# truncated_product " << to_string(ss.truncated_product) << " = " << fmt(ss.truncated_product.get_d())
                    << " ; " << ss.tail_policy << '\n';
                for (const auto& [p, r] : ss.factors) reports.push_back(r);
            }
            out << "prime,floor_exponent,stabilization_exponent,method,raw_counts,density_exact,density\n";
            for (const auto& r : reports) {
                out << r.prime << ',' << r.floor_exponent << ',' << r.stabilization_exponent << ',' << r.method << ',';
                for (std::size_t k = 0; k < r.raw_counts.size(); ++k) out << (k ? " " : "") << r.raw_counts[k].get_str();
                out << ',' << to_string(r.density) << ',' << fmt(r.density.get_d()) << '\n';
            }
        } else if (sub == c_eis) {
            std::vector<Element> gammas;
            if (gamma_text == "all") gammas = d.elements();
            else gammas.push_back(parse_gamma(d, gamma_text));
            const Rational nmax = parse_rational(nmax_text);
            out << "gamma_index,n_num,n_den,c_value,c_exact,prime_bound,local_factors\n";
            for (const Element& gamma : gammas) {
                DensityEngine engine(d, gamma);
                std::vector<Rational> ns;
                if (d.q_value(gamma) == 0) ns.push_back(Rational(0));
                for (const auto& n : admissible_exponents(d, gamma, Rational(0), nmax)) ns.push_back(n);
                for (const auto& n : ns) {
                    EisensteinCoefficient c;
                    if (n == 0) {
                        c = eisenstein_coefficient(d, gamma, n, g.prime_bound);
                    } else {
                        SingularSeries ss = engine.singular_series(n, g.prime_bound);
                        c = eisenstein_from_series(d, n, ss);
                    }
                    out << d.index(gamma) << ',' << n.get_num().get_str() << ',' << n.get_den().get_str() << ',' << fmt(c.value) << ','
                        << (c.exact_value ? to_string(*c.exact_value) : std::string()) << ',' << g.prime_bound << ','
                        << (c.series ? factor_list(*c.series) : std::string()) << '\n';
                }
            }
        } else if (sub == c_count) {
            Element gamma = parse_gamma(d, gamma_text);
            Window w{make_frame(v), parse_rational(rho_text)};
            EquidistributionOptions opt;
            opt.prime_bound = g.prime_bound;
            opt.samples = samples;
            opt.eps = eps;
            opt.seed = g.seed;
            opt.workers = g.workers;
            EquidistributionReport rep = equidistribution_run(d, gamma, w, parse_rational(nmin_text), parse_rational(nmax_count), opt);
            out << "# mu_a0 " << fmt(rep.mu_a0.value) << " +- " << fmt(rep.mu_a0.std_error) << " ; mu_infty " << fmt(rep.mu_infty.value)
                << " +- " << fmt(rep.mu_infty.std_error) << " ; mean_ratio " << fmt(rep.mean_ratio) << '\n';
            for (const auto& note : rep.notes) out << "# " << note << '\n';
            out << "n,empirical,predicted,ratio,mu_infty,ss_truncated,grazing_count,ss_truncated_exact\n";
            for (const auto& r : rep.rows)
                out << to_string(r.n) << ',' << r.empirical << ',' << fmt(r.predicted) << ',' << fmt(r.ratio) << ',' << fmt(rep.mu_infty.value)
                    << ',' << fmt(r.ss_truncated.get_d()) << ',' << r.grazing << ',' << to_string(r.ss_truncated) << '\n';
        } else if (sub == c_predict) {
            Element gamma = parse_gamma(d, gamma_text);
            const Rational n = parse_rational(n_text);
            std::vector<std::pair<std::size_t, Integer>> designated;
            std::stringstream ss(boundary_text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto colon = item.find(':');
                if (colon == std::string::npos) fail(ErrorKind::InvalidInput, "boundary entries are index:degree");
                designated.emplace_back(std::stoul(item.substr(0, colon)), Integer(item.substr(colon + 1)));
            }
            std::vector<CuspDatum> planes;
            if (!designated.empty()) planes = find_isotropic_planes(d, cusp_bound);
            const Rational order = theta_order(g, Rational(floor_div(n.get_num(), n.get_den()) + 1));
            std::vector<BoundarySeries> series;
            series.reserve(designated.size());
            std::vector<BoundaryTerm> terms;
            for (const auto& [idx, deg] : designated) {
                if (idx >= planes.size()) fail(ErrorKind::InvalidInput, "cusp index " + std::to_string(idx) + " out of range");
                series.emplace_back(d, planes[idx], order);
            }
            for (std::size_t i = 0; i < designated.size(); ++i) terms.push_back({&series[i], designated[i].second});
            DegreePrediction dp = degree_prediction(d, gamma, n, mu_s, terms, g.prime_bound);
            for (std::size_t i = 0; i < dp.u.size(); ++i)
                out << "# cusp " << designated[i].first << " u=" << fmt(dp.u[i].value)
                    << (dp.u[i].exact_value ? " exact " + to_string(*dp.u[i].exact_value) : std::string()) << " a=" << to_string(dp.u[i].a)
                    << (dp.u[i].order_note.empty() ? std::string() : " order " + dp.u[i].order_note) << '\n';
            if (!dp.main.note.empty()) out << "# " << dp.main.note << '\n';
            out << "gamma_index,n,main_term,total,representable,prime_bound,error_order\n";
            out << d.index(gamma) << ',' << to_string(n) << ',' << fmt(dp.main.value) << ',' << fmt(dp.total) << ','
                << (dp.main.representable ? 1 : 0) << ',' << g.prime_bound << ',' << dp.main.error_order << '\n';
        }
    } catch (const Error& e) {
        std::cout.flush();
        std::cerr << "error[" << kind_name(e.kind()) << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cout.flush();
        std::cerr << "error[invalid_input]: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
