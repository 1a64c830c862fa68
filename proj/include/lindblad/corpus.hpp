// corpus.hpp — The built-in example systems as machine-readable fixtures with
// expected results, and the harness that checks every module against them.

#pragma once

#include "lindblad/json_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lindblad::corpus {

// Declarative expectations; absent fields are skipped by the harness.
struct Expected {
    std::optional<std::vector<Complex>> spectrum;
    double spectrum_tol = 1e-9;
    std::optional<Index> stationary_dim;
    std::optional<Index> invariant_dim;
    std::optional<Index> commutant_dim;
    std::optional<std::vector<std::vector<Index>>> level_dims; // basin ranks per level
    std::optional<std::vector<double>> intertwiner_shifts;
    std::optional<std::vector<std::pair<Index, Index>>> class_shapes; // (n, inner dim)
    std::optional<bool> is_algebra;
    std::optional<bool> max_symmetric;
    std::optional<std::vector<Matrix>> stationary_basis;
    std::optional<std::vector<Matrix>> invariant_observables;
    double subspace_tol = 1e-7;
};

struct Fixture {
    std::string name;
    std::string source; // short provenance note
    LindbladGenerator generator;
    std::optional<PerturbedGenerator> perturbed;
    std::optional<LindbladGenerator> variant; // alternative representation
    Expected expected;
};

// --------------------------- generator builders ------------------------------

inline LindbladGenerator two_level_exchange() {
    return make_generator(2, {matrix_unit(2, 0, 1), matrix_unit(2, 1, 0)});
}

inline LindbladGenerator two_basins() {
    Matrix hp = Matrix::Zero(3, 3), hm = Matrix::Zero(3, 3);
    hp(0, 0) = 1;
    hp(0, 2) = 1;
    hm(0, 0) = 1;
    hm(0, 2) = -1;
    hm(1, 2) = 1;
    return make_generator(3, {hp, hm});
}

inline LindbladGenerator two_basins_with_phase() {
    Matrix hp = Matrix::Zero(3, 3), hm = Matrix::Zero(3, 3);
    hp(0, 2) = 1;
    hm(0, 2) = 1;
    hm(1, 2) = 1;
    return make_generator(3, {hp, hm});
}

inline LindbladGenerator inner_dissipation() {
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = 1;
    hp(0, 2) = 1;
    hp(1, 0) = 1;
    hp(2, 3) = 1;
    hp(3, 2) = 1;
    hm(0, 1) = -1;
    hm(0, 2) = 1;
    hm(1, 0) = 1;
    hm(2, 3) = -1;
    hm(3, 2) = 1;
    return make_generator(4, {hp, hm});
}

inline LindbladGenerator dephasing_pair() {
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = 1;
    hp(2, 3) = 1;
    hm(1, 0) = 1;
    hm(3, 2) = -1;
    return make_generator(4, {hp, hm});
}

inline LindbladGenerator undamped_pair() {
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = 1;
    h(1, 1) = 1;
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = 1;
    hp(2, 3) = 1;
    hm(1, 0) = 1;
    hm(3, 2) = 1;
    return make_generator(h, {hp, hm});
}

inline LindbladGenerator stationary_phase_pair() {
    auto g = undamped_pair();
    g.hamiltonian.setZero();
    return g;
}

// Couplings 1/sqrt(2) at (1,2) and (3,4) with +-1 at (1,3) realize the rate
// equations r11' = r22 + 2 r33, r22' = -r22, r33' = -2 r33 + r44,
// r44' = -r44 exactly.
inline LindbladGenerator decay_cascade() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = s;
    hp(0, 2) = 1;
    hp(2, 3) = s;
    hm(0, 1) = s;
    hm(0, 2) = -1;
    hm(2, 3) = s;
    return make_generator(4, {hp, hm});
}

// All matrix units as transfer operators: rho' = d (omega Tr[rho] - rho).
inline LindbladGenerator maximal_mixing(Index d) {
    std::vector<Matrix> ops;
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            ops.push_back(matrix_unit(d, i, j));
        }
    }
    return make_generator(d, std::move(ops));
}

// Same evolution from the discrete Weyl operators X^a Z^b / sqrt(d).
inline LindbladGenerator maximal_mixing_weyl(Index d) {
    Matrix x = Matrix::Zero(d, d), z = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) {
        x((k + 1) % d, k) = 1.0;
        z(k, k) = std::exp(kI * (2.0 * M_PI * static_cast<double>(k) / static_cast<double>(d)));
    }
    std::vector<Matrix> ops;
    Matrix xa = Matrix::Identity(d, d);
    for (Index a = 0; a < d; ++a) {
        Matrix w = xa;
        for (Index b = 0; b < d; ++b) {
            ops.push_back(w / std::sqrt(static_cast<double>(d)));
            w = w * z;
        }
        xa = x * xa;
    }
    return make_generator(d, std::move(ops));
}

// --------------------------- perturbation builders ----------------------------

inline PerturbedGenerator pumped_exchange() {
    Matrix kp = Matrix::Zero(2, 2);
    kp(1, 1) = 1.0; // (1 - sigma_z)/2
    return make_perturbed(two_level_exchange(), {}, {}, {kp, Matrix::Zero(2, 2)});
}

inline PerturbedGenerator enclosure_merge() {
    Matrix k = Matrix::Zero(4, 4);
    k(0, 2) = 1.0;
    k(3, 0) = 0.5;
    return make_perturbed(dephasing_pair(), {}, {},
                          {Matrix::Zero(4, 4), Matrix::Zero(4, 4), k});
}

inline PerturbedGenerator hamiltonian_dephasing() {
    Matrix v = Matrix::Zero(4, 4);
    v(0, 2) = 1.0;
    v(2, 0) = 1.0;
    return make_perturbed(dephasing_pair(), v, {}, {});
}

// Two truncated oscillator ladders (levels 0..2) decaying independently,
// merged in second order by creation operators plus one dissipator that
// exchanges the two top levels.
inline PerturbedGenerator ladder_merge() {
    const Index n = 3, d = 2 * n;
    Matrix a = Matrix::Zero(n, n);
    for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    const Matrix zero_n = Matrix::Zero(n, n);
    Matrix h1(d, d), h2(d, d), k1(d, d), k2(d, d);
    h1 << a, zero_n, zero_n, zero_n;
    h2 << zero_n, zero_n, zero_n, a;
    Matrix adag = a.adjoint();
    k1 << adag, zero_n, zero_n, zero_n;
    k2 << zero_n, zero_n, zero_n, adag;
    Matrix k3 = Matrix::Zero(d, d);
    k3(n - 1, d - 1) = 1.0;
    k3(d - 1, n - 1) = 1.0;
    const Matrix zero_d = Matrix::Zero(d, d);
    return make_perturbed(make_generator(d, {h1, h2}), {}, {}, {zero_d, zero_d, k1, k2, k3});
}

// --------------------------- the fixtures ------------------------------------

namespace detail {

inline std::vector<Matrix> basis_diag(Index d, std::initializer_list<std::vector<double>> diags) {
    std::vector<Matrix> out;
    for (const auto& v : diags) {
        Matrix m = Matrix::Zero(d, d);
        for (Index i = 0; i < d; ++i) m(i, i) = v[static_cast<size_t>(i)];
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace detail

inline std::vector<Fixture> fixtures() {
    std::vector<Fixture> out;

    {
        Fixture f;
        f.name = "5.1.1-dissipation";
        f.source = "worked example 5.1.1: two-level amplitude exchange";
        f.generator = two_level_exchange();
        f.generator.labels = {"h_plus", "h_minus"};
        f.expected.spectrum = {{0, 0}, {-1, 0}, {-1, 0}, {-2, 0}};
        f.expected.stationary_dim = 1;
        f.expected.invariant_dim = 1;
        f.expected.commutant_dim = 1;
        f.expected.level_dims = std::vector<std::vector<Index>>{{2}};
        f.expected.intertwiner_shifts = std::vector<double>{};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{1, 2}};
        f.expected.max_symmetric = false;
        f.expected.stationary_basis = {Matrix(0.5 * Matrix::Identity(2, 2))};
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.2-two-basins";
        f.source = "worked example 5.1.2: decay onto two basins, no phase relations";
        f.generator = two_basins();
        f.expected.stationary_dim = 2;
        f.expected.invariant_dim = 2;
        f.expected.commutant_dim = 1;
        f.expected.level_dims = std::vector<std::vector<Index>>{{1, 1}, {1}};
        f.expected.intertwiner_shifts = std::vector<double>{};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{1, 1}, {1, 1}};
        f.expected.is_algebra = false;
        f.expected.stationary_basis = {matrix_unit(3, 0, 0), matrix_unit(3, 1, 1)};
        f.expected.invariant_observables =
            detail::basis_diag(3, {{1, 0, 2.0 / 3.0}, {0, 1, 1.0 / 3.0}});
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.3-phase-relations";
        f.source = "worked example 5.1.3: two basins with a stationary phase relation";
        f.generator = two_basins_with_phase();
        f.expected.stationary_dim = 4;
        f.expected.invariant_dim = 4;
        f.expected.commutant_dim = 1;
        f.expected.level_dims = std::vector<std::vector<Index>>{{1, 1}, {1}};
        f.expected.intertwiner_shifts = std::vector<double>{0.0};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{2, 1}};
        f.expected.is_algebra = false;
        {
            Matrix a3 = Matrix::Zero(3, 3);
            a3(0, 1) = 1;
            a3(2, 2) = 1.0 / 3.0;
            auto obs = detail::basis_diag(3, {{1, 0, 2.0 / 3.0}, {0, 1, 1.0 / 3.0}});
            obs.push_back(a3);
            obs.push_back(a3.adjoint());
            f.expected.invariant_observables = obs;
        }
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.4-inner-dissipation";
        f.source = "worked example 5.1.4: collecting block with dissipation inside";
        f.generator = inner_dissipation();
        f.expected.stationary_dim = 1;
        f.expected.invariant_dim = 1;
        f.expected.commutant_dim = 1;
        f.expected.level_dims = std::vector<std::vector<Index>>{{2}, {2}};
        f.expected.intertwiner_shifts = std::vector<double>{};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{1, 2}};
        {
            Matrix st = Matrix::Zero(4, 4);
            st(0, 0) = st(1, 1) = 0.5;
            f.expected.stationary_basis = {st};
        }
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.5-dephasing";
        f.source = "worked example 5.1.5: two enclosures, out-of-phase dissipation";
        f.generator = dephasing_pair();
        f.expected.stationary_dim = 2;
        f.expected.invariant_dim = 2;
        f.expected.commutant_dim = 2;
        f.expected.level_dims = std::vector<std::vector<Index>>{{2, 2}};
        f.expected.intertwiner_shifts = std::vector<double>{};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{1, 2}, {1, 2}};
        f.expected.is_algebra = true;
        f.expected.invariant_observables =
            detail::basis_diag(4, {{1, 1, 0, 0}, {0, 0, 1, 1}});
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.6-undamped-oscillation";
        f.source = "worked example 5.1.6: in-phase pair with an oscillating phase relation";
        f.generator = undamped_pair();
        f.expected.stationary_dim = 2;
        f.expected.invariant_dim = 2;
        f.expected.commutant_dim = 2;
        f.expected.level_dims = std::vector<std::vector<Index>>{{2, 2}};
        f.expected.intertwiner_shifts = std::vector<double>{1.0};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{2, 2}};
        f.expected.is_algebra = true;
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.7-stationary-phase";
        f.source = "worked example 5.1.7: in-phase pair without the Hamiltonian";
        f.generator = stationary_phase_pair();
        f.expected.stationary_dim = 4;
        f.expected.invariant_dim = 4;
        f.expected.commutant_dim = 4;
        f.expected.level_dims = std::vector<std::vector<Index>>{{2, 2}};
        f.expected.intertwiner_shifts = std::vector<double>{0.0};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{2, 2}};
        f.expected.is_algebra = true;
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.8-cascade";
        f.source = "worked example 5.1.8: two flow lines; couplings normalized to the "
                   "printed rate equations, which fixes the off-diagonal decay as "
                   "r13' = -r13 + r24";
        f.generator = decay_cascade();
        f.expected.stationary_dim = 1;
        f.expected.invariant_dim = 1;
        f.expected.commutant_dim = 1;
        f.expected.level_dims = std::vector<std::vector<Index>>{{1}, {1, 1}, {1}};
        f.expected.intertwiner_shifts = std::vector<double>{};
        f.expected.class_shapes = std::vector<std::pair<Index, Index>>{{1, 1}};
        f.expected.stationary_basis = {matrix_unit(4, 0, 0)};
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "5.1.9-maximal";
        f.source = "worked example 5.1.9: maximally symmetric evolution, matrix-unit and "
                   "Weyl representations";
        f.generator = maximal_mixing(3);
        f.variant = maximal_mixing_weyl(3);
        f.expected.stationary_dim = 1;
        f.expected.invariant_dim = 1;
        f.expected.commutant_dim = 1;
        f.expected.level_dims = std::vector<std::vector<Index>>{{3}};
        f.expected.max_symmetric = true;
        f.expected.stationary_basis = {Matrix(Matrix::Identity(3, 3) / 3.0)};
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "6.2.1-unique-base";
        f.source = "case study 6.2.1: pumping the two-level exchange, closed-form series";
        f.generator = two_level_exchange();
        f.perturbed = pumped_exchange();
        f.expected.stationary_dim = 1;
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "6.2.3-enclosure-merge";
        f.source = "case study 6.2.3: two enclosures merged by one added dissipator";
        f.generator = dephasing_pair();
        f.perturbed = enclosure_merge();
        f.expected.stationary_dim = 2;
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "6.2.4-hamiltonian-dephasing";
        f.source = "case study 6.2.4: dephasing pair coupled by a Hamiltonian";
        f.generator = dephasing_pair();
        f.perturbed = hamiltonian_dephasing();
        f.expected.stationary_dim = 2;
        out.push_back(std::move(f));
    }
    {
        Fixture f;
        f.name = "6.2.5-cascade-merge";
        f.source = "case study 6.2.5: two oscillator ladders merged through the top level; "
                   "the exchange dissipator couples the two highest states";
        f.generator = ladder_merge().base;
        f.perturbed = ladder_merge();
        f.expected.stationary_dim = 4;
        out.push_back(std::move(f));
    }
    return out;
}

inline std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& f : fixtures()) names.push_back(f.name);
    return names;
}

// --------------------------- JSON form ----------------------------------------

inline nlohmann::json fixture_to_json(const Fixture& f) {
    using nlohmann::json;
    json j = io::generator_to_json(f.generator);
    j["name"] = f.name;
    j["source"] = f.source;
    if (f.perturbed) j["perturbation"] = io::perturbed_to_json(*f.perturbed);
    if (f.variant) j["variant"] = io::generator_to_json(*f.variant);

    json e;
    const auto& x = f.expected;
    if (x.spectrum) {
        json arr = json::array();
        for (const auto& v : *x.spectrum) arr.push_back(io::to_json(v));
        e["spectrum"] = arr;
        e["spectrum_tol"] = x.spectrum_tol;
    }
    if (x.stationary_dim) e["stationary_dim"] = *x.stationary_dim;
    if (x.invariant_dim) e["invariant_dim"] = *x.invariant_dim;
    if (x.commutant_dim) e["commutant_dim"] = *x.commutant_dim;
    if (x.level_dims) e["level_dims"] = *x.level_dims;
    if (x.intertwiner_shifts) e["intertwiner_shifts"] = *x.intertwiner_shifts;
    if (x.class_shapes) {
        json arr = json::array();
        for (const auto& [n, d] : *x.class_shapes) arr.push_back(json::array({n, d}));
        e["class_shapes"] = arr;
    }
    if (x.is_algebra) e["is_algebra"] = *x.is_algebra;
    if (x.max_symmetric) e["max_symmetric"] = *x.max_symmetric;
    if (x.stationary_basis) e["stationary_basis"] = io::matrices_to_json(*x.stationary_basis);
    if (x.invariant_observables) {
        e["invariant_observables"] = io::matrices_to_json(*x.invariant_observables);
    }
    e["subspace_tol"] = x.subspace_tol;
    j["expected"] = e;
    return j;
}

inline Fixture fixture_from_json(const nlohmann::json& j) {
    Fixture f;
    f.name = j.value("name", "");
    f.source = j.value("source", "");
    f.generator = io::generator_from_json(j);
    if (j.contains("perturbation")) f.perturbed = io::perturbed_from_json(j.at("perturbation"));
    if (j.contains("variant")) f.variant = io::generator_from_json(j.at("variant"));
    if (j.contains("expected")) {
        const auto& e = j.at("expected");
        auto& x = f.expected;
        if (e.contains("spectrum")) {
            std::vector<Complex> sp;
            for (const auto& v : e.at("spectrum")) sp.push_back(io::complex_from_json(v));
            x.spectrum = sp;
            x.spectrum_tol = e.value("spectrum_tol", 1e-9);
        }
        if (e.contains("stationary_dim")) x.stationary_dim = e.at("stationary_dim").get<Index>();
        if (e.contains("invariant_dim")) x.invariant_dim = e.at("invariant_dim").get<Index>();
        if (e.contains("commutant_dim")) x.commutant_dim = e.at("commutant_dim").get<Index>();
        if (e.contains("level_dims")) {
            x.level_dims = e.at("level_dims").get<std::vector<std::vector<Index>>>();
        }
        if (e.contains("intertwiner_shifts")) {
            x.intertwiner_shifts = e.at("intertwiner_shifts").get<std::vector<double>>();
        }
        if (e.contains("class_shapes")) {
            std::vector<std::pair<Index, Index>> cs;
            for (const auto& p : e.at("class_shapes")) {
                cs.emplace_back(p.at(0).get<Index>(), p.at(1).get<Index>());
            }
            x.class_shapes = cs;
        }
        if (e.contains("is_algebra")) x.is_algebra = e.at("is_algebra").get<bool>();
        if (e.contains("max_symmetric")) x.max_symmetric = e.at("max_symmetric").get<bool>();
        if (e.contains("stationary_basis")) {
            std::vector<Matrix> ms;
            for (const auto& m : e.at("stationary_basis")) ms.push_back(io::matrix_from_json(m));
            x.stationary_basis = ms;
        }
        if (e.contains("invariant_observables")) {
            std::vector<Matrix> ms;
            for (const auto& m : e.at("invariant_observables")) {
                ms.push_back(io::matrix_from_json(m));
            }
            x.invariant_observables = ms;
        }
        x.subspace_tol = e.value("subspace_tol", 1e-7);
    }
    return f;
}

// --------------------------- data directory -----------------------------------

inline std::string default_data_dir() {
    if (const char* env = std::getenv("LINDBLAD_DATA_DIR")) return env;
#ifdef LINDBLAD_DATA_DIR
    return LINDBLAD_DATA_DIR;
#else
    return "data";
#endif
}

inline Fixture load(const std::string& name, const std::string& data_dir = default_data_dir()) {
    const auto path = std::filesystem::path(data_dir) / "fixtures" / (name + ".json");
    if (!std::filesystem::exists(path)) {
        std::string known;
        for (const auto& n : fixture_names()) known += " " + n;
        throw InputError("unknown fixture '" + name + "' (no file at " + path.string() +
                         "); known fixtures:" + known);
    }
    return fixture_from_json(io::read_json_file(path.string()));
}

inline void export_fixtures(const std::string& data_dir = default_data_dir()) {
    const auto dir = std::filesystem::path(data_dir) / "fixtures";
    std::filesystem::create_directories(dir);
    for (const auto& f : fixtures()) {
        io::write_text_file((dir / (f.name + ".json")).string(), fixture_to_json(f).dump(2) + "\n");
    }
}

// --------------------------- the check harness --------------------------------

struct CheckResult {
    std::string fixture;
    std::string check;
    bool pass = false;
    double defect = 0.0;
    std::string detail;
};

struct CorpusReport {
    std::vector<CheckResult> entries;

    bool all_pass() const {
        for (const auto& e : entries) {
            if (!e.pass) return false;
        }
        return true;
    }
    Index failures() const {
        Index n = 0;
        for (const auto& e : entries) {
            if (!e.pass) ++n;
        }
        return n;
    }
};

namespace detail {

inline void run_declarative_checks(const Fixture& f, const Tolerance& tol,
                                   std::vector<CheckResult>& out) {
    auto add = [&](std::string check, bool pass, double defect, std::string detail = {}) {
        out.push_back({f.name, std::move(check), pass, defect, std::move(detail)});
    };
    const auto& g = f.generator;
    const auto& x = f.expected;

    const auto vrep = validate(g, tol);
    add("validate", vrep.pass(),
        std::max({vrep.hamiltonian_hermiticity_defect, vrep.trace_preservation_defect,
                  std::max(0.0, -vrep.min_choi_eigenvalue)}));

    const auto sd = decompose(g, tol);
    if (x.spectrum) {
        auto got = sd.eigenvalues;
        auto want = *x.spectrum;
        auto key = [](Complex a, Complex b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        };
        std::sort(got.begin(), got.end(), key);
        std::sort(want.begin(), want.end(), key);
        double worst = got.size() == want.size() ? 0.0 : 1.0;
        if (got.size() == want.size()) {
            for (size_t i = 0; i < got.size(); ++i) {
                worst = std::max(worst, std::abs(got[i] - want[i]));
            }
        }
        add("spectrum", worst <= x.spectrum_tol, worst);
    }
    if (x.stationary_dim) {
        add("stationary-dim", static_cast<Index>(sd.kernel.size()) == *x.stationary_dim,
            std::abs(static_cast<double>(sd.kernel.size()) - static_cast<double>(*x.stationary_dim)));
    }
    if (x.invariant_dim) {
        add("invariant-dim", static_cast<Index>(sd.left_kernel.size()) == *x.invariant_dim,
            std::abs(static_cast<double>(sd.left_kernel.size()) -
                     static_cast<double>(*x.invariant_dim)));
    }

    const auto rep = analyze_structure(g, tol);
    if (x.commutant_dim) {
        add("commutant-dim", rep.commutant_dim == *x.commutant_dim,
            std::abs(static_cast<double>(rep.commutant_dim - *x.commutant_dim)));
    }
    if (x.level_dims) {
        bool ok = rep.levels.size() == x.level_dims->size();
        if (ok) {
            for (size_t l = 0; l < rep.levels.size(); ++l) {
                std::vector<Index> got;
                for (const auto& p : rep.levels[l]) got.push_back(numeric_rank(p, tol.rank_tol));
                std::sort(got.begin(), got.end());
                auto want = (*x.level_dims)[l];
                std::sort(want.begin(), want.end());
                ok = ok && got == want;
            }
        }
        add("levels", ok, ok ? 0.0 : 1.0);
    }
    if (x.intertwiner_shifts) {
        std::vector<double> got;
        for (const auto& tw : rep.intertwiners) got.push_back(tw.energy_shift);
        auto want = *x.intertwiner_shifts;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        double worst = got.size() == want.size() ? 0.0 : 1.0;
        if (got.size() == want.size()) {
            for (size_t i = 0; i < got.size(); ++i) {
                worst = std::max(worst, std::abs(got[i] - want[i]));
            }
        }
        add("intertwiners", worst <= 1e-8, worst);
    }
    if (x.class_shapes) {
        std::vector<std::pair<Index, Index>> got;
        for (const auto& c : rep.dephasing_classes) got.emplace_back(c.multiplicity, c.inner_dim);
        auto want = *x.class_shapes;
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        add("dephasing-classes", got == want, got == want ? 0.0 : 1.0);
    }

    const auto ss = stationary_states(g, sd, tol);
    if (x.is_algebra) {
        const auto alg = invariant_observable_closure(ss, tol);
        add("algebra-closure", alg.is_algebra == *x.is_algebra,
            std::max(alg.product_defect, alg.adjoint_defect));
    }
    if (x.max_symmetric) {
        const auto ms = detect_max_symmetry(g, tol);
        add("max-symmetry", ms.is_maximal == *x.max_symmetric, ms.defect);
    }
    if (x.stationary_basis) {
        const double angle = subspace_angle(ss.basis_states, *x.stationary_basis);
        add("stationary-basis-span", angle <= x.subspace_tol, angle);
    }
    if (x.invariant_observables) {
        const double angle = subspace_angle(ss.invariant_observables, *x.invariant_observables);
        add("invariant-observable-span", angle <= x.subspace_tol, angle);
    }
}

inline Matrix brute_force_unique_stationary(const LindbladGenerator& g, const Tolerance& tol) {
    auto kernel = null_space(build_superoperator(g).matrix, tol);
    if (kernel.size() != 1) {
        throw CertificationError("brute-force stationary state is not unique");
    }
    Matrix rho = hermitize(unvectorize(kernel.front(), g.dim));
    if (rho.norm() < 0.5) rho = hermitize(kI * unvectorize(kernel.front(), g.dim));
    rho /= rho.trace().real();
    return rho;
}

inline void run_bespoke_checks(const Fixture& f, const Tolerance& tol,
                               std::vector<CheckResult>& out) {
    auto add = [&](std::string check, bool pass, double defect, std::string detail = {}) {
        out.push_back({f.name, std::move(check), pass, defect, std::move(detail)});
    };

    if (f.name == "5.1.8-cascade") {
        // realized rate equations on the diagonal matrix units
        const auto& g = f.generator;
        Matrix rates = Matrix::Zero(4, 4);
        for (Index j = 0; j < 4; ++j) {
            const Matrix d = apply_schrodinger(g, matrix_unit(4, j, j));
            for (Index i = 0; i < 4; ++i) rates(i, j) = d(i, i);
        }
        Matrix want = Matrix::Zero(4, 4);
        want(0, 1) = 1;
        want(0, 2) = 2;
        want(1, 1) = -1;
        want(2, 2) = -2;
        want(2, 3) = 1;
        want(3, 3) = -1;
        add("rate-equations", (rates - want).norm() <= 1e-12, (rates - want).norm());
    }
    if (f.name == "5.1.9-maximal" && f.variant) {
        const double diff = (build_superoperator(f.generator).matrix -
                             build_superoperator(*f.variant).matrix)
                                .norm();
        add("weyl-variant", diff <= 1e-10, diff);
        const auto ms = detect_max_symmetry(f.generator, tol);
        add("max-symmetry-rate", std::abs(ms.lambda - 3.0) <= 1e-9, std::abs(ms.lambda - 3.0));
    }

    if (!f.perturbed) return;
    const auto& pg = *f.perturbed;

    if (f.name == "6.2.1-unique-base") {
        auto series = expand_unique(pg, 20, tol);
        const Matrix sx = matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0);
        double worst = 0.0;
        for (int n = 0; 2 * n + 1 <= 11; ++n) {
            worst = std::max(worst, (series.sigmas[static_cast<size_t>(2 * n + 1)] -
                                     std::pow(-2.0, -n) * 0.5 * sx)
                                        .norm());
        }
        for (int n = 1; 2 * n <= 11; ++n) {
            worst = std::max(worst, series.sigmas[static_cast<size_t>(2 * n)].norm());
        }
        add("series-coefficients", worst <= 1e-10, worst);

        const double lambda = 0.5;
        const Matrix closed =
            0.5 * Matrix::Identity(2, 2) + (lambda / (1 + lambda * lambda / 2)) * 0.5 * sx;
        const double dsum = (series.partial_sum(lambda) - closed).norm();
        add("series-closed-form", dsum <= 1e-8, dsum);
        const double res = series_residual(pg, series, lambda);
        add("series-residual", res <= 1e-8, res);
        add("series-divergence", series_diverges(series, 1.5) && !series_diverges(series, 0.5),
            0.0, "radius sqrt(2)");
    } else if (f.name == "6.2.3-enclosure-merge") {
        auto series = expand_degenerate(pg, 6, tol);
        const auto ss = stationary_states(pg.base, tol);
        const Matrix& k = pg.k_ops.back();
        const Matrix q1 = ss.basin_projectors[0], q2 = ss.basin_projectors[1];
        const Matrix rho1 = ss.basis_states[0], rho2 = ss.basis_states[1];
        const double t1 = std::real((q1 * k * rho2 * k.adjoint() * q1).trace());
        const double t2 = std::real((q2 * k * rho1 * k.adjoint() * q2).trace());
        const double alpha_expected = t1 / (t1 + t2);
        const Complex alpha0 = series.alphas[0](0);
        add("alpha0-formula", std::abs(alpha0 - alpha_expected) <= 1e-9,
            std::abs(alpha0 - alpha_expected));
        add("alpha0-range", alpha0.real() > 0.0 && alpha0.real() <= 1.0, 0.0);

        const double lambda = 0.05;
        const Matrix brute = brute_force_unique_stationary(at_lambda(pg, lambda), tol);
        const double diff = (series.partial_sum(lambda) - brute).norm();
        add("series-vs-kernel", diff <= 1e-6, diff);
    } else if (f.name == "6.2.4-hamiltonian-dephasing") {
        auto series = expand_degenerate(pg, 6, tol);
        const auto ss = stationary_states(pg.base, tol);
        auto inv = constrained_inverse(pg.base, ss, tol);
        const Superoperator e = build_E(pg);
        const Matrix q1 = ss.basin_projectors[0];
        const Matrix rho1 = ss.basis_states[0], rho2 = ss.basis_states[1];
        const Complex denom = (q1 * e.apply(inv.solve(e.apply(rho1 - rho2)))).trace();
        const Complex num = (q1 * e.apply(inv.solve(e.apply(rho2)))).trace();
        const Complex alpha0 = series.alphas[0](0);
        add("alpha0-condition", std::abs(alpha0 * denom + num) <= 1e-9,
            std::abs(alpha0 * denom + num));
        // the coefficient in front of alpha0 must be non-negative
        add("alpha0-denominator-sign", denom.real() >= -tol.match_tol && std::abs(denom.imag()) < 1e-9,
            std::min(0.0, denom.real()));

        const double lambda = 0.05;
        const Matrix brute = brute_force_unique_stationary(at_lambda(pg, lambda), tol);
        const double diff = (series.partial_sum(lambda) - brute).norm();
        add("series-vs-kernel", diff <= 1e-6, diff);
    } else if (f.name == "6.2.5-cascade-merge") {
        const auto ss = stationary_states(pg.base, tol);
        auto inv = constrained_inverse(pg.base, ss, tol);
        const Superoperator sf = build_F(pg);
        // ladder enclosures: Q1 covers the first oscillator
        Matrix q1_full = Matrix::Zero(6, 6);
        q1_full.topLeftCorner(3, 3) = Matrix::Identity(3, 3);
        const Matrix rho_diff = ss.basis_states[0] - ss.basis_states[1];

        // the transfer functional needs exactly N = 2 lifts before the top
        // level connects the ladders
        Matrix iter = rho_diff;
        double t0 = std::abs((q1_full * sf.apply(iter)).trace());
        iter = -inv.solve(sf.apply(iter));
        double t1 = std::abs((q1_full * sf.apply(iter)).trace());
        iter = -inv.solve(sf.apply(iter));
        double t2 = std::abs((q1_full * sf.apply(iter)).trace());
        add("transfer-depth", t0 <= 1e-10 && t1 <= 1e-10 && t2 > 1e-6, t2,
            "nonzero only after two lifts");

        auto series = expand_degenerate(pg, 8, tol);
        const Complex alpha0 = series.alphas[0](0);
        add("alpha0-symmetric", std::abs(alpha0 - Complex(0.5, 0)) <= 1e-8,
            std::abs(alpha0 - Complex(0.5, 0)));

        const double lambda = 0.05;
        const Matrix brute = brute_force_unique_stationary(at_lambda(pg, lambda), tol);
        const double diff = (series.partial_sum(lambda) - brute).norm();
        add("series-vs-kernel", diff <= 1e-6, diff);
    }
}

} // namespace detail

inline CorpusReport run_fixture(const Fixture& f, const Tolerance& tol = {}) {
    CorpusReport rep;
    detail::run_declarative_checks(f, tol, rep.entries);
    detail::run_bespoke_checks(f, tol, rep.entries);
    return rep;
}

inline CorpusReport run_all(const Tolerance& tol = {},
                            const std::string& data_dir = default_data_dir()) {
    CorpusReport rep;
    for (const auto& name : fixture_names()) {
        const Fixture f = load(name, data_dir);
        auto one = run_fixture(f, tol);
        rep.entries.insert(rep.entries.end(), one.entries.begin(), one.entries.end());
    }
    return rep;
}

} // namespace lindblad::corpus
