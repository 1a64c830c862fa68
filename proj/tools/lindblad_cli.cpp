// lindblad_cli.cpp — Command-line front end: parse generator specifications,
// dispatch the analyses, emit reports.
//
// Exit codes: 0 success, 1 certification failure, 2 usage or input error.

#include "lindblad/corpus.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace lindblad;
using nlohmann::json;

struct CommonOptions {
    Tolerance tol;
    std::uint64_t seed = 0xC0FFEE;
    std::string format = "json";
    std::string out_path;
    std::string data_dir = corpus::default_data_dir();
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--tol-rank", opt.tol.rank_tol, "relative rank/null-space threshold");
    cmd->add_option("--tol-match", opt.tol.match_tol, "matrix equality threshold");
    cmd->add_option("--tol-eig", opt.tol.eig_group_tol, "eigenvalue clustering threshold");
    cmd->add_option("--seed", opt.seed, "seed for the generic-element fallback");
    cmd->add_option("--format", opt.format, "output format: json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    cmd->add_option("--out", opt.out_path, "write the report to this file instead of stdout");
    cmd->add_option("--data-dir", opt.data_dir, "fixture data directory");
}

void emit(const CommonOptions& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        io::write_text_file(opt.out_path, text);
    }
}

LindbladGenerator load_generator(const std::string& path) {
    return io::generator_from_json(io::read_json_file(path));
}

Matrix load_state(const std::string& path, Index dim) {
    if (path.empty()) return Matrix::Identity(dim, dim) / static_cast<double>(dim);
    const json j = io::read_json_file(path);
    const Matrix m = j.contains("matrix") ? io::matrix_from_json(j.at("matrix"))
                                          : io::matrix_from_json(j);
    if (m.rows() != dim || m.cols() != dim) {
        throw InputError("initial state dimension does not match the generator");
    }
    return m;
}

std::string structure_text(const StructureReport& rep, const Tolerance& tol) {
    std::ostringstream s;
    s.precision(6);
    s << "Hilbert space structure (dim " << rep.dim << ")\n";
    const Index p0rank = numeric_rank(rep.p0, tol.rank_tol);
    s << "Decay: lowest level has rank " << p0rank << "; maximal decaying subspace rank "
      << rep.dim - p0rank << "\n";
    for (size_t l = 0; l < rep.levels.size(); ++l) {
        s << "  level " << l << (l == 0 ? " (collecting)" : " (decaying)") << ": basin ranks";
        for (const auto& b : rep.levels[l]) s << " " << numeric_rank(b, tol.rank_tol);
        s << "\n";
    }
    s << "Dissipation: each collecting basin carries one full-rank stationary state\n";
    s << "Dephasing: " << rep.dephasing_classes.size() << " class(es)\n";
    for (size_t c = 0; c < rep.dephasing_classes.size(); ++c) {
        const auto& cls = rep.dephasing_classes[c];
        s << "  class " << c << ": " << cls.multiplicity << " basin(s) x inner dimension "
          << cls.inner_dim;
        if (cls.multiplicity > 1) {
            s << ", shifts";
            for (Index m = 0; m < cls.multiplicity; ++m) {
                s << " " << cls.group_hamiltonian(m, m).real();
            }
        }
        s << "\n";
    }
    s << "Intertwiners: " << rep.intertwiners.size() << "\n";
    for (const auto& tw : rep.intertwiners) {
        s << "  basins " << tw.basin_j << " -> " << tw.basin_i
          << (tw.energy_shift == 0.0 ? ": stationary phase relation"
                                     : ": oscillating phase relation, shift ")
          << (tw.energy_shift == 0.0 ? "" : std::to_string(tw.energy_shift)) << "\n";
    }
    s << "Enclosures: " << rep.enclosure_projectors.size()
      << " minimal conserved projector(s); commutant dimension " << rep.commutant_dim << "\n";
    s << "Stationary dimension (states + phase relations): " << rep.stationary_dim << "\n";
    for (const auto& w : rep.warnings) s << "warning: " << w << "\n";
    return s.str();
}

std::string spectrum_text(const SpectralDecomposition& sd) {
    std::ostringstream s;
    s.precision(12);
    s << "eigenvalues of the generator (dim " << sd.dim << ", spectral gap " << sd.gap() << ")\n";
    for (const auto& c : sd.clusters) {
        s << "  " << c.value.real();
        if (c.value.imag() != 0.0) s << (c.value.imag() > 0 ? "+" : "") << c.value.imag() << "i";
        s << "  multiplicity " << c.algebraic << "  [" << to_string(c.path) << "]";
        if (c.jordan_defect > 0) s << "  jordan defect " << c.jordan_defect;
        s << "\n";
    }
    return s.str();
}

int cmd_validate(const std::string& path, const CommonOptions& opt) {
    const auto g = load_generator(path);
    const auto rep = validate(g, opt.tol);
    if (opt.format == "text") {
        std::ostringstream s;
        s << "hermiticity defect: " << rep.hamiltonian_hermiticity_defect
          << (rep.hermiticity_ok ? " (ok)" : " (FAIL)") << "\n"
          << "trace preservation defect: " << rep.trace_preservation_defect
          << (rep.trace_ok ? " (ok)" : " (FAIL)") << "\n"
          << "min Choi eigenvalue at dt=" << rep.choi_dt << ": " << rep.min_choi_eigenvalue
          << (rep.cp_ok ? " (ok)" : " (FAIL)") << "\n";
        if (rep.transfer_count_warning) {
            s << "warning: more transfer operators than dim^2 - 1\n";
        }
        emit(opt, s.str());
    } else {
        emit(opt, io::to_json(rep).dump(2));
    }
    return rep.pass() ? 0 : 1;
}

int cmd_spectrum(const std::string& path, const CommonOptions& opt) {
    const auto g = load_generator(path);
    const auto sd = decompose(g, opt.tol);
    const auto ss = stationary_states(g, sd, opt.tol, opt.seed);
    if (opt.format == "text") {
        emit(opt, spectrum_text(sd));
    } else {
        emit(opt, io::to_json(sd, &ss).dump(2));
    }
    return 0;
}

int cmd_structure(const std::string& path, const CommonOptions& opt) {
    const auto g = load_generator(path);
    const auto rep = analyze_structure(g, opt.tol, opt.seed);
    if (opt.format == "text") {
        emit(opt, structure_text(rep, opt.tol));
    } else {
        emit(opt, io::to_json(rep).dump(2));
    }
    return 0;
}

int cmd_evolve(const std::string& path, const std::string& state_path, double t_max, int steps,
               const CommonOptions& opt) {
    const auto g = load_generator(path);
    const DensityMatrix rho0 = DensityMatrix::checked(load_state(state_path, g.dim), opt.tol);
    const auto traj = trajectory(g, rho0, t_max, steps, opt.tol);
    if (opt.format == "csv") {
        emit(opt, io::trajectory_to_csv(traj));
    } else if (opt.format == "text") {
        std::ostringstream s;
        s.precision(9);
        for (size_t k = 0; k < traj.times.size(); ++k) {
            s << "t=" << traj.times[k] << "  min eigenvalue " << traj.monitors[k].min_eigenvalue
              << "  rank " << traj.monitors[k].rank_estimate << "\n";
        }
        emit(opt, s.str());
    } else {
        emit(opt, io::to_json(traj).dump(2));
    }
    return 0;
}

int cmd_asymptotics(const std::string& path, const std::string& state_path,
                    const CommonOptions& opt) {
    const auto g = load_generator(path);
    const Matrix rho0 = load_state(state_path, g.dim);
    const auto rep = analyze_structure(g, opt.tol, opt.seed);
    const auto form = asymptotic_state(g, rho0, rep, opt.tol);
    if (opt.format == "text") {
        std::ostringstream s;
        s.precision(9);
        for (const auto& c : form.components) {
            s << "class " << c.class_index << ": weight " << c.lambda << "\n";
        }
        s << "model residual at t=" << form.t_check << ": " << form.model_residual << "\n";
        emit(opt, s.str());
    } else {
        emit(opt, io::to_json(form, rep).dump(2));
    }
    return 0;
}

int cmd_perturb(const std::string& path, int order, std::vector<double> lambdas, bool probe,
                const CommonOptions& opt) {
    const auto pg = io::perturbed_from_json(io::read_json_file(path));
    if (probe) {
        if (lambdas.empty()) lambdas = {0.1};
        const auto rep = structure_continuity_probe(pg, lambdas, opt.tol);
        if (opt.format == "text") {
            std::ostringstream s;
            for (const auto& p : rep.points) {
                s << "lambda=" << p.lambda << ": stationary dim " << p.stationary_dim
                  << ", collecting basins " << p.collecting_basin_count << ", intertwiners "
                  << p.stationary_intertwiners + p.oscillating_intertwiners << "\n";
            }
            for (const auto& t : rep.transitions) {
                s << "transition at lambda=" << t.lambda << ": " << t.kind << " (" << t.detail
                  << ")\n";
            }
            emit(opt, s.str());
        } else {
            emit(opt, io::to_json(rep).dump(2));
        }
        return 0;
    }
    const auto kernel_dim = null_space(build_superoperator(pg.base).matrix, opt.tol).size();
    const PerturbationSeries series = kernel_dim == 1 ? expand_unique(pg, order, opt.tol)
                                                      : expand_degenerate(pg, order, opt.tol);
    std::vector<double> residual_at = lambdas.empty() ? std::vector<double>{0.001, 0.01, 0.1}
                                                      : lambdas;
    if (opt.format == "text") {
        std::ostringstream s;
        s.precision(9);
        s << "series order " << series.order << ", kernel dimension " << kernel_dim << "\n";
        for (size_t n = 0; n < series.sigmas.size(); ++n) {
            s << "  ||sigma_" << n << "|| = " << series.sigmas[n].norm() << "\n";
        }
        for (double l : residual_at) {
            s << "residual at lambda=" << l << ": " << series_residual(pg, series, l)
              << (series_diverges(series, l) ? "  (ratio test: diverges)" : "") << "\n";
        }
        emit(opt, s.str());
    } else {
        emit(opt, io::to_json(series, residual_at, pg).dump(2));
    }
    return 0;
}

int cmd_corpus(const std::string& action, const std::string& name, const CommonOptions& opt) {
    if (action == "list") {
        std::ostringstream s;
        for (const auto& n : corpus::fixture_names()) s << n << "\n";
        emit(opt, s.str());
        return 0;
    }
    if (action == "export") {
        corpus::export_fixtures(opt.data_dir);
        std::cout << "wrote " << corpus::fixture_names().size() << " fixtures to " << opt.data_dir
                  << "/fixtures\n";
        return 0;
    }
    if (action == "show") {
        const auto f = corpus::load(name, opt.data_dir);
        emit(opt, corpus::fixture_to_json(f).dump(2));
        return 0;
    }
    if (action == "run") {
        corpus::CorpusReport rep;
        if (name.empty()) {
            rep = corpus::run_all(opt.tol, opt.data_dir);
        } else {
            rep = corpus::run_fixture(corpus::load(name, opt.data_dir), opt.tol);
        }
        std::ostringstream s;
        s.precision(6);
        for (const auto& e : rep.entries) {
            s << (e.pass ? "PASS" : "FAIL") << "  " << e.fixture << " / " << e.check
              << "  (defect " << e.defect << (e.detail.empty() ? "" : "; " + e.detail) << ")\n";
        }
        s << (rep.all_pass() ? "all checks passed" : "FAILURES: ") // summary line
          << (rep.all_pass() ? "" : std::to_string(rep.failures())) << "\n";
        emit(opt, s.str());
        return rep.all_pass() ? 0 : 1;
    }
    throw InputError("unknown corpus action: " + action);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis of generators of completely positive semigroups: spectra, "
                 "stationary states, Hilbert-space structure, perturbation series"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string input, state_path, corpus_action, corpus_name;
    double t_max = 10.0;
    int steps = 100, order = 10;
    std::vector<double> lambdas;
    bool probe = false;

    auto* validate_cmd = app.add_subcommand("validate", "check generator well-formedness and complete positivity");
    validate_cmd->add_option("input", input, "generator JSON file")->required();
    add_common(validate_cmd, opt);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues, path classes, stationary states");
    spectrum_cmd->add_option("input", input, "generator JSON file")->required();
    add_common(spectrum_cmd, opt);

    auto* structure_cmd = app.add_subcommand("structure", "levels, basins, enclosures, dephasing classes");
    structure_cmd->add_option("input", input, "generator JSON file")->required();
    add_common(structure_cmd, opt);

    auto* evolve_cmd = app.add_subcommand("evolve", "propagate a state and emit the trajectory");
    evolve_cmd->add_option("input", input, "generator JSON file")->required();
    evolve_cmd->add_option("--state", state_path, "initial state JSON (default: completely mixed)");
    evolve_cmd->add_option("--t-max", t_max, "final time");
    evolve_cmd->add_option("--steps", steps, "number of steps");
    add_common(evolve_cmd, opt);

    auto* asym_cmd = app.add_subcommand("asymptotics", "long-time form of an evolved state");
    asym_cmd->add_option("input", input, "generator JSON file")->required();
    asym_cmd->add_option("--state", state_path, "initial state JSON (default: completely mixed)");
    add_common(asym_cmd, opt);

    auto* perturb_cmd = app.add_subcommand("perturb", "stationary-state series or continuity probe");
    perturb_cmd->add_option("input", input, "perturbation JSON file")->required();
    perturb_cmd->add_option("--order", order, "series truncation order");
    perturb_cmd->add_option("--lambda", lambdas, "lambda values (repeatable)");
    perturb_cmd->add_flag("--probe", probe, "run the structure continuity probe instead");
    add_common(perturb_cmd, opt);

    auto* corpus_cmd = app.add_subcommand("corpus", "built-in example corpus");
    corpus_cmd->add_option("action", corpus_action, "list | run | show | export")->required();
    corpus_cmd->add_option("name", corpus_name, "fixture name (for run/show)");
    add_common(corpus_cmd, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        opt.tol.validate();
        if (validate_cmd->parsed()) return cmd_validate(input, opt);
        if (spectrum_cmd->parsed()) return cmd_spectrum(input, opt);
        if (structure_cmd->parsed()) return cmd_structure(input, opt);
        if (evolve_cmd->parsed()) return cmd_evolve(input, state_path, t_max, steps, opt);
        if (asym_cmd->parsed()) return cmd_asymptotics(input, state_path, opt);
        if (perturb_cmd->parsed()) return cmd_perturb(input, order, lambdas, probe, opt);
        if (corpus_cmd->parsed()) return cmd_corpus(corpus_action, corpus_name, opt);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 1;
    } catch (const NotInRangeError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 1;
    } catch (const DegenerateBeyondOrderError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
