// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

// acs: command-line driver for the cluster models.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "acs/cluster/cluster.hpp"
#include "acs/config/calibration.hpp"
#include "acs/isa/assembler.hpp"
#include "acs/kernels/kernels.hpp"
#include "acs/quant/io.hpp"
#include "acs/quant/reference.hpp"
#include "acs/rbe/staging.hpp"

#ifndef ACS_DEFAULT_CALIBRATION
#define ACS_DEFAULT_CALIBRATION "config/calibration.json"
#endif

namespace fs = std::filesystem;
using namespace acs;
using json = nlohmann::ordered_json;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    std::string out = "acs_out";
    std::string calibration = ACS_DEFAULT_CALIBRATION;
};

void write_file(const Globals& g, const std::string& name, const std::string& text) {
    fs::create_directories(g.out);
    std::ofstream f(fs::path(g.out) / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (fs::path(g.out) / name).string());
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
}

quant::QTensor random_tensor(std::mt19937_64& rng, std::vector<int> shape, int bits) {
    std::size_t n = 1;
    for (int d : shape) n *= std::size_t(d);
    std::uniform_int_distribution<std::int32_t> dist(0, (1 << bits) - 1);
    std::vector<std::int32_t> data(n);
    for (auto& v : data) v = dist(rng);
    return quant::QTensor(std::move(shape), std::move(data), quant::BitWidth(bits), false);
}

json cycle_report_json(const rbe::CycleReport& r) {
    json j;
    json ph;
    for (std::size_t p = 0; p < rbe::kNumPhases; ++p) ph[rbe::to_string(rbe::Phase(p))] = r.phase_cycles[p];
    j["phase_cycles"] = ph;
    j["total_cycles"] = r.total_cycles;
    j["macs"] = r.macs;
    j["ops"] = r.ops;
    j["binary_ops"] = r.binary_ops;
    j["ops_per_cycle"] = r.ops_per_cycle();
    j["compute_ops_per_cycle"] = r.compute_ops_per_cycle();
    j["gops"] = r.gops();
    j["binary_gops"] = r.binary_gops();
    j["clock_hz"] = r.clock_hz;
    return j;
}

// ---- rbe ----------------------------------------------------------------

int rbe_run(const Globals& g, const config::Calibration& cal, const std::string& path, bool check) {
    const auto spec = read_json(path);
    auto job = rbe::job_from_json(spec);
    rbe::require_valid(job);
    const fs::path dir = fs::path(path).parent_path();
    std::mt19937_64 rng(g.seed);
    const int f = quant::filter_size(job.mode);
    const auto acts = spec.contains("activations")
                          ? quant::load_qtensor(dir / spec.at("activations").get<std::string>())
                          : random_tensor(rng, {job.hin(), job.win(), job.kin}, job.i_bits);
    const auto wgts = spec.contains("weights") ? quant::load_qtensor(dir / spec.at("weights").get<std::string>())
                                               : random_tensor(rng, {job.kout, job.kin, f, f}, job.w_bits);
    if (acts.shape() != std::vector<int>{job.hin(), job.win(), job.kin} ||
        wgts.shape() != std::vector<int>{job.kout, job.kin, f, f})
        throw ValidationError("activation or weight tensor shape does not match the job");

    auto staged = rbe::stage_job(acts, wgts, job.norm, job.mode, job.w_bits, job.i_bits, job.o_bits, job.padding);
    rbe::FunctionalStats st;
    const auto report = rbe::execute_timed(staged.job, staged.mem, cal.rbe, rbe::OverflowPolicy::Trap, &st);
    const auto out = rbe::read_outputs(staged.mem, staged.job);

    json j;
    j["job"] = rbe::to_json(staged.job);
    j["seed"] = g.seed;
    j["cycles"] = cycle_report_json(report);
    j["functional"] = {{"binconv_evaluations", st.binconv_evaluations},
                       {"output_words_written", st.output_words_written},
                       {"max_and_gates_per_step", st.max_and_gates_per_step}};
    std::ostringstream tl;
    tl << "phase,cycles,addr,words\n";
    for (const auto& s : report.timeline)
        tl << rbe::to_string(s.phase) << ',' << s.cycles << ',' << s.addr << ',' << s.words << '\n';

    int rc = 0;
    if (check) {
        const auto ref = quant::reference_conv(acts, wgts, job.norm, job.mode, quant::BitWidth(job.o_bits), job.padding);
        std::size_t bad = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) bad += ref.data()[i] != out.data()[i];
        j["check"] = bad ? "MISMATCH" : "MATCH";
        j["mismatches"] = bad;
        std::cout << (bad ? "MISMATCH " + std::to_string(bad) + " of " + std::to_string(ref.size()) : "MATCH") << "\n";
        rc = bad ? 1 : 0;
    }
    write_file(g, "rbe_report.json", dump(j));
    write_file(g, "rbe_timeline.csv", tl.str());
    fs::create_directories(g.out);
    quant::save_qtensor(out, fs::path(g.out) / "rbe_output.json");
    std::cout << "total_cycles " << report.total_cycles << " ops_per_cycle " << report.ops_per_cycle() << " gops "
              << report.gops() << "\n";
    return rc;
}

int rbe_sweep(const Globals& g, const config::Calibration& cal, int kin, int kout, int side, int obits) {
    const auto rows = rbe::throughput_sweep(cal.rbe, kin, kout, side, {2, 3, 4, 5, 6, 7, 8}, {2, 3, 4, 5, 6, 7, 8}, obits);
    const auto csv = rbe::sweep_csv(rows);
    write_file(g, "rbe_sweep.csv", csv);
    std::cout << csv;
    return 0;
}

// ---- isa / kernels ------------------------------------------------------

int isa_run(const Globals& g, const std::string& path, std::uint64_t max_cycles) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto prog = isa::assemble(ss.str());
    FlatMemory mem(cluster::TcdmGeometry::base, cluster::TcdmGeometry::size);
    const auto trace = isa::run(prog, mem, max_cycles);
    json j = json::parse(trace.to_json());
    j["utilization"] = trace.utilization();
    j["steady_state_utilization"] = trace.steady_state_utilization();
    write_file(g, "isa_trace.json", dump(j));
    std::cout << "cycles " << trace.cycles << " retired " << trace.retired << (trace.trap ? " TRAP" : "") << "\n";
    return trace.trap ? 1 : 0;
}

json bench_one(const std::string& name, const kernels::KernelSpec& spec, bool baseline, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int32_t> dist(0, (1 << spec.precision) - 1);
    std::vector<std::int32_t> a(std::size_t(spec.m) * spec.k), b(std::size_t(spec.k) * spec.n);
    for (auto& v : a) v = dist(rng);
    for (auto& v : b) v = dist(rng);
    const auto run = kernels::run_matmul(spec, a, b, baseline);
    const bool ok = run.c == kernels::matmul_oracle(spec.m, spec.n, spec.k, a, b);
    if (!ok) throw Error("kernel " + name + " disagrees with the oracle");
    const auto& s = run.stats;
    json j;
    j["name"] = name;
    j["m"] = spec.m;
    j["n"] = spec.n;
    j["k"] = spec.k;
    j["precision"] = spec.precision;
    j["macload"] = spec.use_macload;
    j["baseline_subbyte"] = baseline;
    j["cycles"] = s.cycles;
    j["instructions"] = s.instructions_retired;
    j["instr_per_mac"] = s.instr_per_mac;
    j["dotp_utilization"] = s.dotp_utilization;
    j["steady_state_utilization"] = s.steady_state_utilization;
    j["loads"] = s.loads;
    j["matches_oracle"] = ok;
    return j;
}

int kernels_bench(const Globals& g, int size) {
    std::mt19937_64 rng(g.seed);
    auto spec = [&](int p, bool ml) {
        kernels::KernelSpec s;
        s.m = s.n = s.k = size;
        s.precision = p;
        s.use_macload = ml;
        if (!ml) s.tile_rows = 2;
        return s;
    };
    json rows = json::array();
    rows.push_back(bench_one("matmul8_macload", spec(8, true), false, rng));
    rows.push_back(bench_one("matmul8_plain", spec(8, false), false, rng));
    rows.push_back(bench_one("matmul4_plain", spec(4, false), false, rng));
    rows.push_back(bench_one("matmul4_baseline_subbyte", spec(4, false), true, rng));
    rows.push_back(bench_one("matmul2_plain", spec(2, false), false, rng));
    rows.push_back(bench_one("matmul2_baseline_subbyte", spec(2, false), true, rng));
    rows.push_back(bench_one("matmul4_macload", spec(4, true), false, rng));
    rows.push_back(bench_one("matmul2_macload", spec(2, true), false, rng));
    auto instr = [&](int i) { return double(rows[std::size_t(i)]["instructions"].get<std::uint64_t>()); };
    auto cyc = [&](int i) { return double(rows[std::size_t(i)]["cycles"].get<std::uint64_t>()); };
    json j;
    j["seed"] = g.seed;
    j["kernels"] = rows;
    j["macload_speedup_8bit"] = cyc(1) / cyc(0);
    j["instruction_ratio_4bit"] = instr(3) / instr(2);
    j["instruction_ratio_2bit"] = instr(5) / instr(4);
    write_file(g, "kernels_bench.json", dump(j));
    for (const auto& r : rows)
        std::cout << r["name"].get<std::string>() << " cycles " << r["cycles"] << " util "
                  << r["steady_state_utilization"] << "\n";
    return 0;
}

// ---- cluster ------------------------------------------------------------

int cluster_run(const Globals& g, const config::Calibration& cal, const std::string& path) {
    auto s = cluster::load_scenario(path, g.seed);
    s.config.dma = cal.dma;
    s.config.rbe = cal.rbe;
    const auto t = cluster::run_cluster(s);
    write_file(g, "cluster_trace.json", dump(t.to_json()));
    if (!t.cycle_csv.empty()) write_file(g, "cluster_cycles.csv", t.cycle_csv);
    std::uint64_t conflicts = 0;
    for (auto c : t.bank_conflicts) conflicts += c;
    std::cout << "total_cycles " << t.total_cycles << " bank_conflicts " << conflicts << "\n";
    return 0;
}

// ---- net ----------------------------------------------------------------

int net_schedule(const Globals& g, config::Calibration cal, const std::string& path, std::uint64_t budget,
                 const std::string& op) {
    const auto net = tiler::load_network(path);
    if (budget) cal.tiler.budget = budget;
    const auto bad = tiler::infeasible_layers(net.layers, cal.tiler.budget);
    if (!bad.empty()) {
        std::string msg = std::to_string(bad.size()) + " layer(s) cannot be tiled:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw ValidationError(msg);
    }
    const auto s = tiler::schedule_network(net.name, net.layers, cal.operating_point(op), cal.power_model(), cal.tiler);
    write_file(g, "schedule.csv", s.csv());
    write_file(g, "schedule.json", dump(s.to_json()));
    std::cout << s.csv() << "total_cycles " << s.total_cycles << " time_us " << s.total_time_us << " energy_uj "
              << s.total_energy_uj << "\n";
    return 0;
}

// ---- abb ----------------------------------------------------------------

int abb_run(const Globals& g, const config::Calibration& cal, const std::string& path, int abb_override) {
    auto sc = abb::abb_scenario_from_json(read_json(path));
    sc.seed = g.seed;
    if (abb_override >= 0) sc.abb_on = abb_override == 1;
    const auto model = cal.abb_model();
    const auto t = abb::simulate(model, sc);
    write_file(g, "abb_trace.csv", t.csv(sc.decimate));
    json j;
    j["scenario"] = path;
    j["seed"] = g.seed;
    j["abb_on"] = sc.abb_on;
    j["cycles"] = t.cycles();
    j["pre_errors"] = t.total_pre_errors;
    j["errors"] = t.total_errors;
    j["up_ramps"] = t.up_ramps;
    j["mean_power_mw"] = t.mean_power_mw();
    j["mean_vbb"] = t.mean_vbb();
    write_file(g, "abb_summary.json", dump(j));
    std::cout << dump(j);
    return 0;
}

int abb_minvdd(const Globals& g, const config::Calibration& cal, std::vector<double> freqs) {
    const auto model = cal.abb_model();
    abb::ProbeConfig probe;
    probe.seed = g.seed;
    if (freqs.empty()) freqs.push_back(cal.abb_targets.f_probe);
    json rows = json::array();
    std::ostringstream csv;
    csv << "freq_mhz,vdd_off,vdd_on,vbb_on,power_off_mw,power_on_mw,power_ref_mw,ratio_on\n";
    csv.setf(std::ios::fixed);
    csv.precision(4);
    for (double f : freqs) {
        const auto off = abb::find_min_vdd(model, f, false, probe);
        const auto on = abb::find_min_vdd(model, f, true, probe);
        const double ref = model.power.total_mw(0.8, f);
        rows.push_back({{"freq_hz", f},
                        {"off", {{"vdd", off.vdd}, {"power_mw", off.power_mw}}},
                        {"on", {{"vdd", on.vdd}, {"vbb", on.vbb}, {"power_mw", on.power_mw}}},
                        {"power_at_0v8_mw", ref},
                        {"power_ratio_on", on.power_mw / ref}});
        csv << f / 1e6 << ',' << off.vdd << ',' << on.vdd << ',' << on.vbb << ',' << off.power_mw << ',' << on.power_mw
            << ',' << ref << ',' << on.power_mw / ref << '\n';
    }
    write_file(g, "abb_minvdd.json", dump(json{{"seed", g.seed}, {"points", rows}}));
    write_file(g, "abb_minvdd.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acs: heterogeneous AI-IoT cluster simulator"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--calibration", g.calibration, "calibration.json")->capture_default_str();

    int rc = 0;
    std::function<int(const config::Calibration&)> action;

    auto* rbe = app.add_subcommand("rbe", "binary engine jobs")->require_subcommand(1);
    std::string job_path;
    bool check = false;
    auto* rbe_run_cmd = rbe->add_subcommand("run", "run one job functionally and timed");
    rbe_run_cmd->add_option("job", job_path, "job JSON")->required();
    rbe_run_cmd->add_flag("--check", check, "compare against the reference convolution");
    rbe_run_cmd->callback([&] { action = [&](const config::Calibration& c) { return rbe_run(g, c, job_path, check); }; });
    int kin = 64, kout = 64, side = 3, obits = 4;
    auto* sweep = rbe->add_subcommand("sweep", "throughput over mode x W x I");
    sweep->add_option("--kin", kin)->capture_default_str();
    sweep->add_option("--kout", kout)->capture_default_str();
    sweep->add_option("--side", side, "output side in pixels")->capture_default_str();
    sweep->add_option("--obits", obits)->capture_default_str();
    sweep->callback([&] { action = [&](const config::Calibration& c) { return rbe_sweep(g, c, kin, kout, side, obits); }; });

    auto* isa = app.add_subcommand("isa", "core ISA")->require_subcommand(1);
    std::string asm_path;
    std::uint64_t max_cycles = 100000000;
    auto* isa_run_cmd = isa->add_subcommand("run", "assemble and run a program on one core");
    isa_run_cmd->add_option("program", asm_path, "assembly file")->required();
    isa_run_cmd->add_option("--max-cycles", max_cycles)->capture_default_str();
    isa_run_cmd->callback([&] { action = [&](const config::Calibration&) { return isa_run(g, asm_path, max_cycles); }; });

    auto* kern = app.add_subcommand("kernels", "kernel library")->require_subcommand(1);
    int size = 64;
    auto* bench = kern->add_subcommand("bench", "matmul suite: MAC&LOAD, plain, sub-byte baseline");
    bench->add_option("--size", size, "M = N = K")->capture_default_str();
    bench->callback([&] { action = [&](const config::Calibration&) { return kernels_bench(g, size); }; });

    auto* clu = app.add_subcommand("cluster", "cluster scenarios")->require_subcommand(1);
    std::string scenario_path;
    auto* clu_run = clu->add_subcommand("run", "run a cluster scenario");
    clu_run->add_option("scenario", scenario_path, "scenario JSON")->required();
    clu_run->callback([&] { action = [&](const config::Calibration& c) { return cluster_run(g, c, scenario_path); }; });

    auto* net = app.add_subcommand("net", "network tiling and scheduling")->require_subcommand(1);
    std::string net_path, op = "0.8V";
    std::uint64_t budget = 0;
    auto* sched = net->add_subcommand("schedule", "tile and schedule a network");
    sched->add_option("network", net_path, "network JSON")->required();
    sched->add_option("--budget", budget, "L1 budget in bytes (default from calibration)");
    sched->add_option("--op", op, "operating point name")->capture_default_str();
    sched->callback([&] { action = [&](const config::Calibration& c) { return net_schedule(g, c, net_path, budget, op); }; });

    auto* abbc = app.add_subcommand("abb", "adaptive body bias")->require_subcommand(1);
    std::string abb_path;
    std::string abb_mode;
    auto* abb_run_cmd = abbc->add_subcommand("run", "closed-loop trace of a workload scenario");
    abb_run_cmd->add_option("scenario", abb_path, "scenario JSON")->required();
    abb_run_cmd->add_option("--abb", abb_mode, "override the scenario: on or off")->check(CLI::IsMember({"on", "off"}));
    abb_run_cmd->callback([&] {
        action = [&](const config::Calibration& c) {
            return abb_run(g, c, abb_path, abb_mode.empty() ? -1 : abb_mode == "on" ? 1 : 0);
        };
    });
    std::vector<double> freqs_mhz;
    auto* minvdd = abbc->add_subcommand("minvdd", "lowest error-free supply with and without bias");
    minvdd->add_option("--freq-mhz", freqs_mhz, "clock frequencies (repeatable)");
    minvdd->callback([&] {
        action = [&](const config::Calibration& c) {
            std::vector<double> hz;
            for (double f : freqs_mhz) hz.push_back(f * 1e6);
            return abb_minvdd(g, c, hz);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        const auto cal = config::load_calibration(g.calibration);
        rc = action(cal);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const isa::DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
