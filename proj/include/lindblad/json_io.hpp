// json_io.hpp — On-disk schemas: generators, perturbations, and the report
// formats emitted by the CLI. Complex numbers serialize as {"re":, "im":},
// matrices as row-major nested arrays of such objects.

#pragma once

#include "lindblad/asymptotics.hpp"
#include "lindblad/dynamics.hpp"
#include "lindblad/perturbation.hpp"
#include "lindblad/spectral.hpp"
#include "lindblad/structure.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace lindblad::io {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

// --------------------------- scalars and matrices ----------------------------

inline json to_json(const Complex& c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

inline Complex complex_from_json(const json& j) {
    if (j.is_number()) return Complex(j.get<double>(), 0.0);
    if (!j.is_object() || !j.contains("re")) {
        throw InputError("expected a complex number as {\"re\":, \"im\":}");
    }
    return Complex(j.at("re").get<double>(), j.value("im", 0.0));
}

inline json to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            row.push_back(to_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InputError("expected a non-empty matrix array");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<size_t>(r));
        if (static_cast<Index>(row.size()) != cols) {
            throw InputError("ragged matrix rows in input");
        }
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = complex_from_json(row.at(static_cast<size_t>(c)));
        }
    }
    return m;
}

inline json matrices_to_json(const std::vector<Matrix>& ms) {
    json arr = json::array();
    for (const auto& m : ms) arr.push_back(to_json(m));
    return arr;
}

// --------------------------- generator schema ---------------------------------

inline json generator_to_json(const LindbladGenerator& g) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["dim"] = g.dim;
    j["hamiltonian"] = to_json(g.hamiltonian);
    j["transfer_ops"] = matrices_to_json(g.transfer_ops);
    if (!g.labels.empty()) j["labels"] = g.labels;
    return j;
}

inline LindbladGenerator generator_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim")) {
        throw InputError("generator: missing \"dim\"");
    }
    const Index d = j.at("dim").get<Index>();
    if (d < 1) throw InputError("generator: dim must be positive");
    Matrix h = j.contains("hamiltonian") ? matrix_from_json(j.at("hamiltonian"))
                                         : Matrix(Matrix::Zero(d, d));
    std::vector<Matrix> ops;
    if (j.contains("transfer_ops")) {
        for (const auto& m : j.at("transfer_ops")) ops.push_back(matrix_from_json(m));
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    try {
        return make_generator(std::move(h), std::move(ops), std::move(labels));
    } catch (const DimensionError& e) {
        throw InputError(std::string("generator: ") + e.what());
    }
}

inline json perturbed_to_json(const PerturbedGenerator& pg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["base"] = generator_to_json(pg.base);
    j["v"] = to_json(pg.v);
    j["w"] = to_json(pg.w);
    j["k_ops"] = matrices_to_json(pg.k_ops);
    return j;
}

inline PerturbedGenerator perturbed_from_json(const json& j) {
    if (!j.is_object() || !j.contains("base")) {
        throw InputError("perturbation: missing \"base\" generator");
    }
    LindbladGenerator base = generator_from_json(j.at("base"));
    const Index d = base.dim;
    Matrix v = j.contains("v") ? matrix_from_json(j.at("v")) : Matrix(Matrix::Zero(d, d));
    Matrix w = j.contains("w") ? matrix_from_json(j.at("w")) : Matrix(Matrix::Zero(d, d));
    std::vector<Matrix> k_ops;
    if (j.contains("k_ops")) {
        for (const auto& m : j.at("k_ops")) k_ops.push_back(matrix_from_json(m));
    }
    try {
        return make_perturbed(std::move(base), std::move(v), std::move(w), std::move(k_ops));
    } catch (const DimensionError& e) {
        throw InputError(std::string("perturbation: ") + e.what());
    }
}

// --------------------------- reports ------------------------------------------

inline json to_json(const ValidationReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"hamiltonian_hermiticity_defect", r.hamiltonian_hermiticity_defect},
                {"trace_preservation_defect", r.trace_preservation_defect},
                {"min_choi_eigenvalue", r.min_choi_eigenvalue},
                {"choi_dt", r.choi_dt},
                {"hermiticity_ok", r.hermiticity_ok},
                {"trace_ok", r.trace_ok},
                {"cp_ok", r.cp_ok},
                {"transfer_count_warning", r.transfer_count_warning},
                {"pass", r.pass()}};
}

inline json to_json(const SpectralDecomposition& sd, const StationarySet* ss = nullptr) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["dim"] = sd.dim;
    json evs = json::array();
    const auto paths = classify_paths(sd);
    for (size_t i = 0; i < sd.eigenvalues.size(); ++i) {
        evs.push_back(json{{"re", sd.eigenvalues[i].real()},
                           {"im", sd.eigenvalues[i].imag()},
                           {"path", to_string(paths[i])}});
    }
    j["eigenvalues"] = evs;
    json clusters = json::array();
    for (const auto& c : sd.clusters) {
        clusters.push_back(json{{"value", to_json(c.value)},
                                {"algebraic", c.algebraic},
                                {"geometric", c.geometric},
                                {"jordan_defect", c.jordan_defect},
                                {"path", to_string(c.path)}});
    }
    j["clusters"] = clusters;
    j["spectral_gap"] = sd.gap();
    if (ss) {
        j["stationary_basis"] = matrices_to_json(ss->basis_states);
        j["phase_relations"] = matrices_to_json(ss->phase_relations);
        j["invariant_observables"] = matrices_to_json(ss->invariant_observables);
    }
    return j;
}

inline json to_json(const StructureReport& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["dim"] = r.dim;
    j["p0"] = to_json(r.p0);
    json levels = json::array();
    for (const auto& lvl : r.levels) levels.push_back(matrices_to_json(lvl));
    j["levels"] = levels;
    j["collecting_basins"] = matrices_to_json(r.collecting_basins);
    j["basin_states"] = matrices_to_json(r.basin_states);
    json tws = json::array();
    for (const auto& tw : r.intertwiners) {
        tws.push_back(json{{"basin_i", tw.basin_i},
                           {"basin_j", tw.basin_j},
                           {"u", to_json(tw.u)},
                           {"energy_shift", tw.energy_shift},
                           {"block_eigenvalue", to_json(tw.block_eigenvalue)},
                           {"defect", tw.defect}});
    }
    j["intertwiners"] = tws;
    json classes = json::array();
    for (const auto& c : r.dephasing_classes) {
        json members = json::array();
        for (Index m : c.members) members.push_back(m);
        classes.push_back(json{{"members", members},
                               {"multiplicity", c.multiplicity},
                               {"inner_dim", c.inner_dim},
                               {"group_hamiltonian", to_json(c.group_hamiltonian)},
                               {"inner_state", to_json(c.inner_state)}});
    }
    j["dephasing_classes"] = classes;
    j["enclosure_projectors"] = matrices_to_json(r.enclosure_projectors);
    j["commutant_dim"] = r.commutant_dim;
    j["stationary_dim"] = r.stationary_dim;
    j["worst_decay_norm"] = r.worst_decay_norm;
    j["warnings"] = r.warnings;
    return j;
}

inline json to_json(const Trajectory& t) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["times"] = t.times;
    j["states"] = matrices_to_json(t.states);
    json mons = json::array();
    for (const auto& m : t.monitors) {
        mons.push_back(json{{"min_eigenvalue", m.min_eigenvalue},
                            {"rank_estimate", m.rank_estimate},
                            {"trace_defect", m.trace_defect},
                            {"hermiticity_defect", m.hermiticity_defect},
                            {"block_norms", m.block_norms}});
    }
    j["monitors"] = mons;
    return j;
}

// CSV mirror: t, Re/Im of each entry row-major, then monitor columns.
inline std::string trajectory_to_csv(const Trajectory& t) {
    std::ostringstream out;
    out.precision(15);
    const Index d = t.states.empty() ? 0 : t.states.front().rows();
    out << "t";
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            out << ",re_" << i << "_" << j << ",im_" << i << "_" << j;
        }
    }
    out << ",min_eigenvalue,rank_estimate,trace_defect,hermiticity_defect";
    const size_t blocks = t.monitors.empty() ? 0 : t.monitors.front().block_norms.size();
    for (size_t b = 0; b < blocks; ++b) out << ",block_norm_" << b;
    out << "\n";
    for (size_t k = 0; k < t.times.size(); ++k) {
        out << t.times[k];
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < d; ++j) {
                out << "," << t.states[k](i, j).real() << "," << t.states[k](i, j).imag();
            }
        }
        const auto& m = t.monitors[k];
        out << "," << m.min_eigenvalue << "," << m.rank_estimate << "," << m.trace_defect << ","
            << m.hermiticity_defect;
        for (double b : m.block_norms) out << "," << b;
        out << "\n";
    }
    return out.str();
}

inline json to_json(const AsymptoticForm& f, const StructureReport& rep) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json comps = json::array();
    for (const auto& c : f.components) {
        comps.push_back(json{{"class_index", c.class_index},
                             {"lambda", c.lambda},
                             {"r", to_json(c.r)},
                             {"group_hamiltonian",
                              to_json(rep.dephasing_classes[static_cast<size_t>(c.class_index)]
                                          .group_hamiltonian)},
                             {"inner_state",
                              to_json(rep.dephasing_classes[static_cast<size_t>(c.class_index)]
                                          .inner_state)}});
    }
    j["components"] = comps;
    j["projection_defect"] = f.projection_defect;
    j["model_residual"] = f.model_residual;
    j["t_check"] = f.t_check;
    return j;
}

inline json to_json(const PerturbationSeries& s, const std::vector<double>& residual_lambdas,
                    const PerturbedGenerator& pg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["order"] = s.order;
    j["sigmas"] = matrices_to_json(s.sigmas);
    json alphas = json::array();
    for (const auto& a : s.alphas) {
        json row = json::array();
        for (Index i = 0; i < a.size(); ++i) row.push_back(to_json(a(i)));
        alphas.push_back(std::move(row));
    }
    j["alphas"] = alphas;
    j["kernel_basis"] = matrices_to_json(s.kernel_basis);
    json residuals = json::array();
    for (double l : residual_lambdas) {
        residuals.push_back(json{{"lambda", l},
                                 {"residual", series_residual(pg, s, l)},
                                 {"diverges", series_diverges(s, l)}});
    }
    j["residuals"] = residuals;
    return j;
}

inline json to_json(const ContinuityReport& r) {
    json j;
    j["schema_version"] = kSchemaVersion;
    json pts = json::array();
    for (const auto& p : r.points) {
        pts.push_back(json{{"lambda", p.lambda},
                           {"stationary_dim", p.stationary_dim},
                           {"collecting_basin_count", p.collecting_basin_count},
                           {"basin_dims", p.basin_dims},
                           {"stationary_intertwiners", p.stationary_intertwiners},
                           {"oscillating_intertwiners", p.oscillating_intertwiners},
                           {"level_dims", p.level_dims}});
    }
    j["points"] = pts;
    json ts = json::array();
    for (const auto& t : r.transitions) {
        ts.push_back(json{{"lambda", t.lambda}, {"kind", t.kind}, {"detail", t.detail}});
    }
    j["transitions"] = ts;
    j["one_way_ok"] = r.one_way_ok;
    return j;
}

// --------------------------- files --------------------------------------------

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file: " + path);
    out << text;
}

} // namespace lindblad::io
