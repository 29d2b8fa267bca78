#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "derand/apps.hpp"
#include "derand/automata.hpp"
#include "derand/fooling.hpp"
#include "derand/gbgame.hpp"
#include "derand/mis.hpp"
#include "derand/rational.hpp"

namespace py = pybind11;
using namespace derand;

namespace {

Rat rat_arg(const py::object& v) { return parse_decimal_or_rat(py::str(v).cast<std::string>()); }

py::dict mis_py(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                const py::object& c) {
    Graph g = Graph::from_edges(n, edges);
    MisOptions opts;
    opts.c = rat_arg(c);
    MisResult res = maximal_independent_set(g, opts);
    py::dict out;
    out["vertices"] = res.vertices;
    out["rounds"] = res.rounds;
    py::list margins;
    for (const auto& st : res.stats) margins.append(rat_str(st.value - st.expectation));
    out["round_margins"] = margins;
    return out;
}

py::dict gb_py(const std::vector<std::vector<int>>& matrix) {
    SignMatrix sm;
    sm.n = static_cast<uint32_t>(matrix.size());
    sm.a = matrix;
    GbResult res = gb_solve(sm);
    py::dict out;
    out["value"] = std::stoll(res.value.get_str());
    out["x"] = res.x;
    out["y"] = res.y;
    out["certified_sq"] = rat_str(res.certified_sq);
    out["certified_sq_float"] = res.certified_sq.get_d();
    return out;
}

py::dict setdisc_py(const std::vector<std::vector<int>>& matrix, const py::object& eps) {
    apps::SetDiscOptions opts;
    if (!eps.is_none()) opts.eps = rat_arg(eps);
    apps::SetDiscResult res = apps::set_discrepancy(matrix, opts);
    py::dict out;
    out["signs"] = res.signs;
    out["sums"] = res.sums;
    out["max_abs"] = res.max_abs;
    out["lambda_sq"] = res.lambda_sq;
    out["guaranteed"] = res.guaranteed;
    out["exists_bound"] = rat_str(res.exists_bound);
    out["support"] = res.support;
    return out;
}

py::dict fool_counter_py(const std::vector<std::vector<long>>& rows, uint32_t eta,
                         const py::object& eps) {
    auto sys = apps::row_counter_system(rows, eta);
    auto fam = automata::canonical_counter(sys);
    auto res = automata::fool(sys, 0, sys.T, rat_arg(eps), fam);
    py::dict out;
    py::list strings;
    for (const auto& s : res.dist.strings) strings.append(automata::to_string(s));
    out["strings"] = strings;
    out["sums"] = res.dist.true_offsets;
    out["support"] = res.dist.strings.size();
    out["certified"] = res.certified;
    out["err_bound"] = rat_str(res.err_bound);
    out["support_bound"] = res.support_bound;
    return out;
}

py::dict jl_py(const std::vector<std::vector<py::object>>& vectors, const py::object& delta,
               uint32_t k) {
    std::vector<std::vector<Rat>> vs;
    for (const auto& row : vectors) {
        std::vector<Rat> v;
        for (const auto& entry : row) v.push_back(rat_arg(entry));
        vs.push_back(std::move(v));
    }
    apps::JlOptions opts;
    opts.k = k;
    apps::JlResult res = apps::jl_transform(vs, rat_arg(delta), opts);
    py::dict out;
    out["matrix"] = res.matrix;
    out["k"] = res.k;
    out["d"] = res.d;
    out["certified"] = res.certified;
    out["worst_distortion"] = rat_str(res.worst_distortion);
    out["worst_distortion_float"] = res.worst_distortion.get_d();
    out["support"] = res.support;
    py::list reports;
    for (const auto& rep : res.reports) {
        py::dict rj;
        rj["norm_sq"] = rat_str(rep.norm_sq);
        rj["distortion"] = rat_str(rep.distortion);
        rj["pass"] = rep.pass;
        reports.append(rj);
    }
    out["reports"] = reports;
    return out;
}

}  // namespace

PYBIND11_MODULE(_derand, m) {
    m.doc() = "deterministic conditional-expectations solvers with exact certificates";
    m.attr("__version__") = "0.1.0";
    m.def("mis", &mis_py, py::arg("n"), py::arg("edges"), py::arg("c") = py::str("1/4"),
          "maximal independent set; edges are (u, v) pairs, c is the marking constant");
    m.def("gb", &gb_py, py::arg("matrix"),
          "Gale-Berlekamp switching: returns row/column signs and the certified bound");
    m.def("set_discrepancy", &setdisc_py, py::arg("matrix"), py::arg("eps") = py::none(),
          "signs keeping every row sum under sqrt(2 n ln 4m); entries in {-1, 0, 1}");
    m.def("fool_counter", &fool_counter_py, py::arg("rows"), py::arg("eta"), py::arg("eps"),
          "small distribution fooling the counter automata given by per-step increments");
    m.def("jl_transform", &jl_py, py::arg("vectors"), py::arg("delta"), py::arg("k") = 0,
          "deterministic JL sign matrix; entries as exact rationals, e.g. '3/5' or '0.25'");
}
