// contractlab — exact principal–agent contract computations from the shell.
//
// Subcommands: validate, gen, critical, learn, shatter, online, experiment.
// Exit codes: 0 success, 1 validation/usage error, 2 resource cap exceeded.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contractlab/contractlab.hpp"

namespace cl = contractlab;

namespace {

std::vector<cl::Rat> parse_rat_list(const std::string& csv) {
    std::vector<cl::Rat> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw cl::ValidationError("empty entry in list: " + csv);
        if (item.find('.') != std::string::npos)
            out.push_back(cl::rat_from_double(std::stod(item)));
        else
            out.push_back(cl::rat_from_string(item));
    }
    if (out.empty()) throw cl::ValidationError("empty list: " + csv);
    return out;
}

cl::Rat parse_rat(const std::string& s) {
    if (s.find('.') != std::string::npos) return cl::rat_from_double(std::stod(s));
    return cl::rat_from_string(s);
}

std::vector<int> parse_sign_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "+1" || item == "1")
            out.push_back(1);
        else if (item == "-1")
            out.push_back(-1);
        else
            throw cl::ValidationError("signs must be +1 or -1, got: " + item);
    }
    if (out.empty()) throw cl::ValidationError("empty sign list");
    return out;
}

std::string payments_str(const cl::Contract& c) {
    std::string s = "(";
    for (std::size_t j = 0; j < c.t.size(); ++j) {
        if (j > 0) s += ", ";
        s += cl::rat_str(c.t[j]);
    }
    return s + ")";
}

// Streams either to a file or stdout.
struct OutTarget {
    std::ofstream file;
    std::ostream& stream(const std::string& path) {
        if (path.empty()) return std::cout;
        file.open(path);
        if (!file) throw cl::ValidationError("cannot write " + path);
        return file;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computations for hidden-action contract instances"};
    app.require_subcommand(1);

    std::string input, out_path;
    std::string gen_kind, mode = "critical", z_csv, alphas_csv, eps_csv;
    std::string exp_kind, rep_mode = "linear";
    std::string eps_str = "1/10", delta_str = "1/10", step_str = "1/10";
    long K = 1, n_actions = 2, m_outcomes = 2, horizon = 1024;
    int trials = 200, instances = 20, seeds = 50, menu_k = 1;
    std::uint64_t seed = 1;
    std::size_t cap = 10'000'000;

    auto* validate = app.add_subcommand("validate", "parse an instance file and report its shape");
    validate->add_option("--input", input)->required();

    auto* gen = app.add_subcommand("gen", "write a constructed instance");
    gen->add_option("kind", gen_kind,
                    "d1-linear|d2-linear|dz-bounded|impossibility|grid-forcing|bitmask-shatter")
        ->required();
    gen->add_option("--eps", eps_str);
    gen->add_option("--delta", delta_str);
    gen->add_option("--K", K);
    gen->add_option("--n", n_actions);
    gen->add_option("--m", m_outcomes);
    gen->add_option("--z", z_csv, "comma signs, e.g. +1,-1");
    gen->add_option("--alphas", alphas_csv, "comma rationals, e.g. 1/4,1/2");
    gen->add_option("--out", out_path);

    auto* critical = app.add_subcommand("critical", "critical values of each type");
    critical->add_option("--input", input)->required();

    auto* learn = app.add_subcommand("learn", "best contract in a class for the instance");
    learn->require_subcommand(1);
    auto* learn_linear = learn->add_subcommand("linear");
    learn_linear->add_option("--input", input)->required();
    learn_linear->add_option("--mode", mode, "critical|grid");
    learn_linear->add_option("--eps", eps_str);
    auto* learn_bounded = learn->add_subcommand("bounded");
    learn_bounded->add_option("--input", input)->required();
    learn_bounded->add_option("--eps", eps_str);
    learn_bounded->add_option("--cap", cap);
    auto* learn_menu = learn->add_subcommand("menu");
    learn_menu->add_option("--input", input)->required();
    learn_menu->add_option("--K", menu_k);
    learn_menu->add_option("--step", step_str, "box grid spacing");
    learn_menu->add_option("--cap", cap);
    auto* learn_comb = learn->add_subcommand("comb");
    learn_comb->add_option("--input", input)->required();

    auto* shatter = app.add_subcommand("shatter", "shattering certificates");
    shatter->require_subcommand(1);
    auto* shatter_verify = shatter->add_subcommand("verify");
    shatter_verify->add_option("--input", input)->required();
    shatter_verify->add_option("--out", out_path, "write witness table as CSV");

    auto* online = app.add_subcommand("online", "follow-the-leader run on the instance");
    online->add_option("--input", input)->required();
    online->add_option("--T", horizon);
    online->add_option("--seed", seed);

    auto* experiment = app.add_subcommand("experiment", "batch experiments, CSV output");
    experiment->add_option("kind", exp_kind,
                           "sample-complexity|rep-error|regret|impossibility")
        ->required();
    experiment->add_option("--eps", eps_csv, "comma list (single value for regret/impossibility)");
    experiment->add_option("--delta", delta_str);
    experiment->add_option("--K", K);
    experiment->add_option("--m", m_outcomes);
    experiment->add_option("--mode", rep_mode, "linear|bounded");
    experiment->add_option("--trials", trials);
    experiment->add_option("--instances", instances);
    experiment->add_option("--seeds", seeds);
    experiment->add_option("--T", horizon);
    experiment->add_option("--seed", seed);
    experiment->add_option("--cap", cap);
    experiment->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help exits 0; any parse failure exits 1
    }

    try {
        OutTarget target;

        if (*validate) {
            cl::Instance inst = cl::load_instance(input);
            std::cout << "ok: outcomes=" << inst.rewards.m()
                      << " types=" << inst.types.size()
                      << " comb_types=" << inst.comb_types.size()
                      << (inst.weights ? " weighted" : "")
                      << (inst.thresholds ? " thresholds" : "")
                      << (inst.witness_space ? " witness_space" : "") << "\n";
            return 0;
        }

        if (*gen) {
            cl::Instance inst = [&]() -> cl::Instance {
                if (gen_kind == "d1-linear") return cl::gen_d1_linear(parse_rat(eps_str));
                if (gen_kind == "d2-linear") return cl::gen_d2_linear(parse_rat(eps_str));
                if (gen_kind == "dz-bounded")
                    return cl::gen_dz_bounded(static_cast<int>(m_outcomes),
                                              parse_rat(eps_str), parse_sign_list(z_csv));
                if (gen_kind == "impossibility")
                    return cl::gen_impossibility(parse_rat(eps_str), parse_rat(delta_str), K)
                        .instance;
                if (gen_kind == "grid-forcing") {
                    std::vector<cl::Rat> alphas = parse_rat_list(alphas_csv);
                    std::vector<cl::Rat> r(alphas.size() + 1, cl::Rat(1));
                    r[0] = 0;
                    return cl::gen_grid_forcing(alphas, cl::Rewards(std::move(r)),
                                                static_cast<int>(n_actions));
                }
                if (gen_kind == "bitmask-shatter")
                    return cl::gen_bitmask_shatter(static_cast<int>(n_actions),
                                                   static_cast<int>(m_outcomes));
                throw cl::ValidationError("unknown generator: " + gen_kind);
            }();
            if (out_path.empty()) {
                std::cout << cl::instance_to_json(inst).dump(2) << "\n";
            } else {
                cl::save_instance(inst, out_path);
                std::cout << "wrote " << out_path << "\n";
            }
            return 0;
        }

        if (*critical) {
            cl::Instance inst = cl::load_instance(input);
            for (const cl::AgentType& theta : inst.types) {
                cl::CriticalValueProfile profile = cl::critical_values(inst.rewards, theta);
                for (std::size_t i = 0; i < profile.breakpoints.size(); ++i) {
                    if (i > 0) std::cout << " ";
                    std::cout << cl::rat_str(profile.breakpoints[i]);
                }
                std::cout << "\n";
            }
            return 0;
        }

        if (*learn) {
            cl::Instance inst = cl::load_instance(input);
            if (*learn_comb) {
                std::vector<cl::CombinatorialType> types = cl::comb_types_of(inst);
                if (types.empty())
                    throw cl::ValidationError("instance has no combinatorial types");
                auto [lc, value] = cl::erm_linear_comb(types, inst.rewards, cl::demand);
                std::cout << "alpha = " << cl::rat_str(lc.alpha)
                          << "\nvalue = " << cl::rat_str(value) << "\n";
                return 0;
            }
            cl::TypeDistribution d = inst.distribution();
            if (*learn_linear) {
                if (mode != "critical" && mode != "grid")
                    throw cl::ValidationError("mode must be critical or grid");
                auto [lc, value] =
                    mode == "critical"
                        ? cl::opt_linear(inst.rewards, d)
                        : cl::opt_linear_grid(inst.rewards, d, parse_rat(eps_str));
                std::cout << "alpha = " << cl::rat_str(lc.alpha)
                          << "\nvalue = " << cl::rat_str(value) << "\n";
            } else if (*learn_bounded) {
                cl::ContractSearchSpace space = cl::ContractSearchSpace::from_bounded(
                    cl::bounded_grid(inst.rewards, parse_rat(eps_str), cap));
                auto [contract, value] = cl::opt_over_set(inst.rewards, d, space, cl::Rat(0));
                std::cout << "contract = " << payments_str(contract)
                          << "\nvalue = " << cl::rat_str(value)
                          << "\ncandidates = " << space.size() << "\n";
            } else if (*learn_menu) {
                cl::ContractSearchSpace space = cl::ContractSearchSpace::box_grid(
                    inst.rewards.m(), parse_rat(step_str), cap);
                auto [menu, value] =
                    cl::opt_menu(inst.rewards, d, menu_k, space, cl::Rat(0), cap);
                for (int k = 0; k < menu.k(); ++k)
                    std::cout << "contract " << k << " = " << payments_str(menu.contracts[k])
                              << "\n";
                std::cout << "value = " << cl::rat_str(value) << "\n";
            }
            return 0;
        }

        if (*shatter) {
            cl::Instance inst = cl::load_instance(input);
            cl::ShatterInstance si = cl::shatter_instance_of(inst);
            cl::ShatterCertificate cert = cl::verify_shattering(si);
            std::cout << (cert.shattered ? "shattered" : "not shattered") << ": types="
                      << si.types.size() << " witnesses=" << si.space.size() << "\n";
            if (!out_path.empty()) {
                std::ofstream f(out_path);
                if (!f) throw cl::ValidationError("cannot write " + out_path);
                cl::CsvWriter csv(f, {"subset", "witness"});
                for (const auto& [subset, witness] : cert.witnesses)
                    csv.write_row({std::to_string(subset), payments_str(witness)});
            }
            return cert.shattered ? 0 : 1;
        }

        if (*online) {
            cl::Instance inst = cl::load_instance(input);
            cl::OnlineRun run =
                cl::ftl_run(inst.rewards, inst.distribution(), cl::FtlLearner::critical_linear(),
                            static_cast<std::size_t>(horizon), seed);
            cl::CsvWriter csv(std::cout, {"T", "cumulative_regret"});
            for (std::size_t t = 256; t <= run.T; t *= 2)
                csv.write_row({cl::CsvWriter::cell(t),
                               cl::CsvWriter::cell(run.cumulative_regret[t - 1])});
            if (run.T < 256)
                csv.write_row({cl::CsvWriter::cell(run.T),
                               cl::CsvWriter::cell(run.cumulative_regret.back())});
            return 0;
        }

        if (*experiment) {
            if (exp_kind == "sample-complexity") {
                cl::SampleComplexityConfig cfg;
                cfg.eps_values = parse_rat_list(eps_csv.empty() ? "1/10,1/20,1/40" : eps_csv);
                cfg.delta = parse_rat(delta_str);
                cfg.trials = trials;
                cfg.seed = seed;
                auto rows = cl::run_sample_complexity(cfg);
                auto& os = target.stream(out_path);
                cl::sample_complexity_csv(rows, os);
                std::cerr << "slope = " << cl::sample_complexity_slope(rows) << "\n";
            } else if (exp_kind == "rep-error") {
                cl::RepErrorConfig cfg;
                cfg.mode = rep_mode == "bounded" ? cl::RepErrorConfig::Mode::bounded
                                                 : cl::RepErrorConfig::Mode::linear;
                if (rep_mode != "linear" && rep_mode != "bounded")
                    throw cl::ValidationError("mode must be linear or bounded");
                cfg.instances = instances;
                cfg.eps_values = parse_rat_list(eps_csv.empty() ? "1/10" : eps_csv);
                cfg.m = static_cast<int>(m_outcomes);
                cfg.seed = seed;
                cfg.cap = cap;
                auto rows = cl::run_rep_error(cfg);
                cl::rep_error_csv(rows, target.stream(out_path));
            } else if (exp_kind == "regret") {
                cl::RegretConfig cfg;
                cfg.eps = parse_rat(eps_csv.empty() ? eps_str : eps_csv);
                cfg.seeds = seeds;
                cfg.horizon = static_cast<std::size_t>(horizon);
                cfg.seed = seed;
                cfg.checkpoints.clear();
                for (std::size_t t = 256; t <= cfg.horizon; t *= 2) cfg.checkpoints.push_back(t);
                if (cfg.checkpoints.empty()) cfg.checkpoints.push_back(cfg.horizon);
                cl::RegretSummary summary = cl::run_regret(cfg);
                cl::regret_csv(summary, target.stream(out_path));
                std::cerr << "slope = " << summary.slope << "\n";
            } else if (exp_kind == "impossibility") {
                cl::ImpossibilityReport rep = cl::run_impossibility(
                    parse_rat(eps_csv.empty() ? eps_str : eps_csv), parse_rat(delta_str), K);
                cl::impossibility_csv(rep, target.stream(out_path));
            } else {
                throw cl::ValidationError("unknown experiment: " + exp_kind);
            }
            return 0;
        }
    } catch (const cl::ResourceCapError& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return 2;
    } catch (const cl::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
