#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlat/boundary.hpp"
#include "qlat/cusp.hpp"
#include "qlat/hyperboloid.hpp"
#include "qlat/local_density.hpp"
#include "qlat/predict.hpp"
#include "qlat/qseries.hpp"
#include "qlat/weil.hpp"

namespace py = pybind11;
using namespace qlat;

namespace {

// Exact values cross the boundary as "a/b" strings; Python's fractions.Fraction parses them.
std::string rat(const Rational& x) { return to_string(x); }

std::vector<std::vector<long>> to_rows(const IntMatrix& m) {
    std::vector<std::vector<long>> out(m.rows(), std::vector<long>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).get_si();
    return out;
}

IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
    const std::size_t c = rows.empty() ? 0 : rows[0].size();
    IntMatrix m(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) fail(ErrorKind::InvalidInput, "ragged rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

double to_double(const BigFloat& x) { return static_cast<double>(x); }

py::dict density_dict(const LocalDensityReport& r) {
    py::dict d;
    d["prime"] = r.prime;
    d["floor_exponent"] = r.floor_exponent;
    d["stabilization_exponent"] = r.stabilization_exponent;
    std::vector<std::string> raw;
    for (const auto& c : r.raw_counts) raw.push_back(c.get_str());
    d["raw_counts"] = raw;
    d["density"] = rat(r.density);
    d["method"] = r.method;
    return d;
}

} // namespace

PYBIND11_MODULE(qlat, m) {
    m.doc() = "Lattice counting, local densities and Eisenstein coefficients";

    static py::exception<Error> exc(m, "QlatError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, ("[" + kind_name(e.kind()) + "] " + e.what()).c_str());
        }
    });

    py::class_<IntegerLattice>(m, "Lattice")
        .def(py::init([](const std::vector<std::vector<long>>& gram, const std::string& name) { return IntegerLattice(from_rows(gram), name); }),
             py::arg("gram"), py::arg("name") = "")
        .def_static("parse", &load_lattice, "lattice file or expression such as 'U+U+rank1(-2)'")
        .def_property_readonly("gram", [](const IntegerLattice& l) { return to_rows(l.gram()); })
        .def_property_readonly("rank", &IntegerLattice::rank)
        .def_property_readonly("name", &IntegerLattice::name)
        .def_property_readonly("determinant", [](const IntegerLattice& l) { return l.determinant().get_str(); })
        .def_property_readonly("signature", [](const IntegerLattice& l) {
            Signature s = signature(l);
            return py::make_tuple(s.positive, s.negative);
        })
        .def("to_json", &lattice_to_json);

    py::class_<FiniteQuadraticModule>(m, "DiscriminantModule")
        .def(py::init<IntegerLattice>())
        .def_property_readonly("order", &FiniteQuadraticModule::order)
        .def_property_readonly("level", &FiniteQuadraticModule::level)
        .def_property_readonly("invariant_factors", &FiniteQuadraticModule::invariant_factors)
        .def_property_readonly("elements", &FiniteQuadraticModule::elements)
        .def("index", &FiniteQuadraticModule::index)
        .def("q_value", [](const FiniteQuadraticModule& d, std::size_t i) { return rat(d.q_value(i)); })
        .def("b_value", [](const FiniteQuadraticModule& d, std::size_t i, std::size_t j) { return rat(d.b_value(i, j)); })
        .def("dump", &FiniteQuadraticModule::dump)
        .def("isotropic_subgroups", [](const FiniteQuadraticModule& d) {
            std::vector<std::vector<std::size_t>> out;
            for (const auto& h : isotropic_subgroups(d)) out.push_back(h.members);
            return out;
        });

    m.def(
        "weil_relations",
        [](const FiniteQuadraticModule& d) {
            RelationReport r = verify_relations(WeilAction(d), 1.0);
            return py::dict(py::arg("unitarity") = r.unitarity, py::arg("braid") = r.braid, py::arg("t_order") = r.t_order);
        },
        "deviations of S S^*, S^2 (ST)^-3 and T^N from the identity");

    m.def(
        "theta_csv", [](const IntegerLattice& k, const std::string& order) { return theta_series(k, parse_rational(order)).csv(); },
        py::arg("lattice"), py::arg("order"));

    m.def(
        "count_split",
        [](const FiniteQuadraticModule& d, std::size_t gamma, const std::string& n, unsigned long p, int s) {
            return count_solutions_split(d, d.element(gamma), parse_rational(n), p, s).get_str();
        },
        py::arg("module"), py::arg("gamma"), py::arg("n"), py::arg("p"), py::arg("s"));
    m.def(
        "count_naive",
        [](const FiniteQuadraticModule& d, std::size_t gamma, const std::string& n, std::uint64_t a) {
            return count_solutions_naive(d, d.element(gamma), parse_rational(n), a).get_str();
        },
        py::arg("module"), py::arg("gamma"), py::arg("n"), py::arg("a"));
    m.def(
        "local_density",
        [](const FiniteQuadraticModule& d, std::size_t gamma, const std::string& n, unsigned long p, std::optional<int> s_max) {
            return density_dict(local_density(d, d.element(gamma), parse_rational(n), p, s_max));
        },
        py::arg("module"), py::arg("gamma"), py::arg("n"), py::arg("p"), py::arg("s_max") = py::none());

    m.def(
        "eisenstein",
        [](const FiniteQuadraticModule& d, std::size_t gamma, const std::string& n, unsigned long prime_bound) {
            EisensteinCoefficient c = eisenstein_coefficient(d, d.element(gamma), parse_rational(n), prime_bound);
            py::dict out;
            out["value"] = to_double(c.value);
            out["exact"] = c.exact_value ? py::cast(rat(*c.exact_value)) : py::none();
            out["truncated_product"] = c.series ? py::cast(rat(c.series->truncated_product)) : py::none();
            out["prime_bound"] = c.prime_bound;
            return out;
        },
        py::arg("module"), py::arg("gamma"), py::arg("n"), py::arg("prime_bound") = 100);

    m.def(
        "cusp",
        [](const FiniteQuadraticModule& d, const std::vector<std::vector<long>>& plane) {
            CuspDatum f = cusp_datum(d, from_rows(plane));
            py::dict out;
            out["plane"] = to_rows(f.plane);
            out["imprimitivity"] = f.imprimitivity.get_str();
            out["kf_gram"] = to_rows(f.kf.gram());
            out["strongly_primitive"] = f.strongly_primitive;
            out["brieskorn_holds"] = f.brieskorn_holds;
            out["projection"] = f.projection;
            return out;
        },
        py::arg("module"), py::arg("plane"));

    m.def(
        "predict",
        [](const FiniteQuadraticModule& d, std::size_t gamma, const std::string& n, double mu_s, unsigned long prime_bound) {
            Prediction p = predict_N(d, d.element(gamma), parse_rational(n), BigFloat(mu_s), prime_bound);
            return py::dict(py::arg("value") = to_double(p.value), py::arg("representable") = p.representable, py::arg("note") = p.note,
                            py::arg("error_order") = p.error_order);
        },
        py::arg("module"), py::arg("gamma"), py::arg("n"), py::arg("mu_s") = 1.0, py::arg("prime_bound") = 100);

    m.def(
        "count_points",
        [](const FiniteQuadraticModule& d, std::size_t gamma, const std::string& n, const std::string& rho) {
            Window w{make_frame(d.lattice()), parse_rational(rho)};
            PointCount c = enumerate_points(d, d.element(gamma), parse_rational(n), w);
            return py::make_tuple(c.count, c.grazing);
        },
        py::arg("module"), py::arg("gamma"), py::arg("n"), py::arg("rho"));

    m.def(
        "measures",
        [](const IntegerLattice& v, const std::string& rho, std::uint64_t samples, std::uint64_t seed) {
            Window w{make_frame(v), parse_rational(rho)};
            MeasureEstimate a0 = mu_a0(w, samples, seed);
            MeasureEstimate mi = mu_infty(v, w, samples, 1e-3, seed + 1);
            return py::dict(py::arg("mu_a0") = a0.value, py::arg("mu_a0_err") = a0.std_error, py::arg("mu_infty") = mi.value,
                            py::arg("mu_infty_err") = mi.std_error);
        },
        py::arg("lattice"), py::arg("rho") = "1", py::arg("samples") = 100000, py::arg("seed") = 1);
}
