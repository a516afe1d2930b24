// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/cluster/cluster.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "acs/isa/assembler.hpp"

namespace acs::cluster {

using isa::Effect;
using isa::EventId;

bool EventUnit::try_release(std::size_t live) {
    if (arrived_.empty() || arrived_.size() < live) return false;
    arrived_.clear();
    ++released_;
    return true;
}

bool EventUnit::consume(int core, EventId e) {
    auto& p = pending_[core][static_cast<std::size_t>(e)];
    const bool was = p;
    p = false;
    return was;
}

namespace {

enum class Block { None, Barrier, Event };

struct CoreSlot {
    int id;
    isa::Core core;
    Block block = Block::None;
    EventId waiting = EventId::DmaDone;
};

}  // namespace

ClusterTrace run_cluster(const Scenario& s, ClusterMemory* mem_out) {
    ClusterMemory local;
    ClusterMemory& mem = mem_out ? *mem_out : local;
    for (const auto& m : s.memory) mem.write_words(m.addr, m.words);
    for (const auto& j : s.rbe_jobs) rbe::require_valid(j);
    for (const auto& d : s.dma) validate(d);

    const auto& cfg = s.config;
    std::vector<CoreSlot> cores;
    cores.reserve(s.cores.size());
    for (const auto& c : s.cores) {
        if (c.id < 0 || c.id >= kNumCores) throw ValidationError("core id " + std::to_string(c.id) + " outside [0, 15]");
        for (const auto& o : cores)
            if (o.id == c.id) throw ValidationError("core id " + std::to_string(c.id) + " used twice");
        isa::validate(c.program);
        cores.push_back({c.id, isa::Core(c.program)});
        auto& st = cores.back().core.state();
        st.set_x(10, static_cast<std::uint32_t>(c.id));
        for (const auto& [r, v] : c.regs) st.set_x(r, v);
    }

    EventUnit events;
    TcdmArbiter arb;
    DmaChannel dma_in(kMasterDmaIn, cfg.dma), dma_out(kMasterDmaOut, cfg.dma);
    rbe::RbeEngine engine(mem, cfg.rbe);
    ClusterTrace tr;
    std::map<int, std::size_t> rbe_slot;  // engine job id -> trace entry
    std::optional<int> rbe_running;
    std::ostringstream csv;
    if (cfg.cycle_csv) csv << "cycle,lic_requests,lic_grants,rbe_request,rbe_granted,dma_in_busy,dma_out_busy,rbe_busy\n";

    auto fire = [&](EventId e) {
        for (auto& c : cores) {
            if (c.block == Block::Event && c.waiting == e) c.block = Block::None;
            else events.set_pending(c.id, e);
        }
    };

    std::uint64_t now = 0, last_progress = 0;
    auto all_done = [&] {
        for (const auto& c : cores)
            if (!c.core.done() || c.block != Block::None) return false;
        return dma_in.idle() && dma_out.idle() && engine.idle();
    };

    std::vector<EventId> fired;
    while (!all_done()) {
        if (now >= cfg.max_cycles) throw Error("cluster simulation exceeded " + std::to_string(cfg.max_cycles) + " cycles");
        if (now - last_progress > cfg.deadlock_window) {
            std::ostringstream os;
            os << "deadlock: no progress for " << cfg.deadlock_window << " cycles at cycle " << now << ";";
            for (const auto& c : cores) {
                os << " core" << c.id << "=";
                if (c.block == Block::Barrier) os << "barrier";
                else if (c.block == Block::Event) os << "wait_" << (c.waiting == EventId::DmaDone ? "dma" : "rbe");
                else if (c.core.done()) os << "halted";
                else os << "pc" << c.core.state().pc;
            }
            os << " dma=" << (dma_in.idle() && dma_out.idle() ? "idle" : "busy")
               << " rbe=" << (engine.idle() ? "idle" : "busy");
            throw DeadlockError(os.str());
        }

        // Gather requests of cores acting in this cycle.
        std::vector<LicRequest> lic;
        std::vector<int> core_req(cores.size(), -1);
        std::vector<bool> acting(cores.size(), false), rbe_full(cores.size(), false);
        for (std::size_t i = 0; i < cores.size(); ++i) {
            auto& c = cores[i];
            if (c.core.trace().cycles != now) continue;
            if (c.block != Block::None) {
                c.core.sleep(1);
                continue;
            }
            if (c.core.done()) continue;
            acting[i] = true;
            const auto* insn = c.core.next();
            if (insn && insn->op == isa::Op::RbeStart && engine.occupancy() >= rbe::RbeEngine::kContexts) {
                rbe_full[i] = true;
                continue;
            }
            if (auto r = c.core.pending_request()) {
                if (TcdmGeometry::contains(r->addr)) {
                    core_req[i] = static_cast<int>(lic.size());
                    lic.push_back({c.id, r->addr});
                } else {
                    ++tr.l2_core_accesses;
                }
            }
        }
        const std::size_t core_reqs = lic.size();
        const auto in_reqs = dma_in.requests();
        const auto out_reqs = dma_out.requests();
        lic.insert(lic.end(), in_reqs.begin(), in_reqs.end());
        lic.insert(lic.end(), out_reqs.begin(), out_reqs.end());
        const auto rbe_req = cfg.timing ? engine.request() : std::nullopt;
        const bool rbe_wants = rbe_req.has_value();
        const int rbe_req_words = rbe_wants ? rbe_req->words : 0;
        const std::uint32_t rbe_req_addr = rbe_wants ? rbe_req->addr : 0;

        ArbitrationResult ar;
        if (cfg.timing) {
            ar = arb.arbitrate(lic, rbe_wants ? std::optional<std::uint32_t>(rbe_req_addr) : std::nullopt,
                               rbe_req_words);
        } else {
            ar.lic_granted.assign(lic.size(), true);
            ar.grants = static_cast<int>(lic.size());
        }
        tr.max_grants_per_cycle = std::max<std::uint64_t>(tr.max_grants_per_cycle, static_cast<std::uint64_t>(ar.grants));
        for (std::size_t r = 0; r < lic.size(); ++r) {
            const auto m = static_cast<std::size_t>(lic[r].master);
            if (ar.lic_granted[r]) {
                ++tr.lic_grants[m];
                ++tr.lic_words;
            } else {
                ++tr.lic_stalls[m];
            }
        }

        // Cores.
        bool progress = false;
        for (std::size_t i = 0; i < cores.size(); ++i) {
            if (!acting[i]) continue;
            auto& c = cores[i];
            if (rbe_full[i] || (core_req[i] >= 0 && !ar.lic_granted[static_cast<std::size_t>(core_req[i])])) {
                c.core.stall(1);
                continue;
            }
            progress = true;
            const auto res = c.core.step(mem);
            switch (res.effect) {
                case Effect::Barrier:
                    c.block = Block::Barrier;
                    events.arrive(c.id);
                    break;
                case Effect::WaitEvent: {
                    const auto e = static_cast<EventId>(res.arg);
                    if (!events.consume(c.id, e)) {
                        c.block = Block::Event;
                        c.waiting = e;
                    }
                    break;
                }
                case Effect::RbeStart: {
                    if (res.arg < 0 || static_cast<std::size_t>(res.arg) >= s.rbe_jobs.size())
                        throw ValidationError("rbe.start " + std::to_string(res.arg) + ": no such job");
                    const auto& job = s.rbe_jobs[static_cast<std::size_t>(res.arg)];
                    if (!cfg.timing) {
                        rbe::execute_functional(job, mem);
                        tr.rbe_jobs.push_back({{res.arg, now, now, now + 1}, {}});
                        fired.push_back(EventId::RbeDone);
                        break;
                    }
                    const int id = engine.enqueue(job);
                    rbe_slot[id] = tr.rbe_jobs.size();
                    tr.rbe_jobs.push_back({{res.arg, now, 0, 0}, {}});
                    break;
                }
                case Effect::DmaStart: {
                    if (res.arg < 0 || static_cast<std::size_t>(res.arg) >= s.dma.size())
                        throw ValidationError("dma.start " + std::to_string(res.arg) + ": no such descriptor");
                    const auto& d = s.dma[static_cast<std::size_t>(res.arg)];
                    const int id = static_cast<int>(tr.dma_transfers.size());
                    tr.dma_transfers.push_back({res.arg, now, 0, 0});
                    if (!cfg.timing) {
                        for (std::uint64_t n = 0; n < d.bytes(); ++n) {
                            const auto [src, dst] = d.byte_addr(n);
                            mem.store8(dst, mem.load8(src));
                        }
                        tr.dma_transfers.back().start = now;
                        tr.dma_transfers.back().end = now + 1;
                        fired.push_back(EventId::DmaDone);
                        break;
                    }
                    (d.direction == DmaDirection::L2ToL1 ? dma_in : dma_out).push(id, d);
                    break;
                }
                default:
                    break;
            }
        }

        // DMA channels.
        auto drive = [&](DmaChannel& ch, const std::vector<LicRequest>& reqs, std::size_t first, int which) {
            std::vector<bool> g(ar.lic_granted.begin() + static_cast<std::ptrdiff_t>(first),
                                ar.lic_granted.begin() + static_cast<std::ptrdiff_t>(first + reqs.size()));
            const auto before = ch.busy_cycles();
            const auto done = ch.tick(g, mem);
            if (ch.busy_cycles() != before) {
                progress = true;
                ++tr.dma_busy_cycles[static_cast<std::size_t>(which)];
            }
            if (done) {
                tr.dma_transfers[static_cast<std::size_t>(*done)].end = now + 1;
                fired.push_back(EventId::DmaDone);
            }
        };
        for (const auto* ch : {&dma_in, &dma_out})
            if (auto id = ch->active_id(); id && tr.dma_transfers[static_cast<std::size_t>(*id)].start == 0)
                tr.dma_transfers[static_cast<std::size_t>(*id)].start = now;
        drive(dma_in, in_reqs, core_reqs, 0);
        drive(dma_out, out_reqs, core_reqs + in_reqs.size(), 1);

        // RBE.
        if (cfg.timing) {
            const auto running = engine.running_id();
            if (running && running != rbe_running) tr.rbe_jobs[rbe_slot.at(*running)].when.start = now;
            rbe_running = running;
            if (running) {
                progress = true;
                ++tr.rbe_busy_cycles;
                if (rbe_wants) {
                    if (ar.rbe_granted) {
                        ++tr.rbe_grants;
                        tr.rbe_words += static_cast<std::uint64_t>(rbe_req_words);
                    } else {
                        ++tr.rbe_stalls;
                    }
                }
            }
            for (int id : engine.tick(!rbe_wants || ar.rbe_granted)) {
                auto& run = tr.rbe_jobs[rbe_slot.at(id)];
                run.when.end = now + 1;
                for (const auto& [cid, rep] : engine.completed())
                    if (cid == id) run.report = rep;
                fired.push_back(EventId::RbeDone);
                rbe_running.reset();
            }
        }

        std::size_t live = 0;
        for (const auto& c : cores) live += !c.core.done() || c.block != Block::None;
        if (events.try_release(live))
            for (auto& c : cores)
                if (c.block == Block::Barrier) c.block = Block::None;
        for (auto e : fired) fire(e);
        fired.clear();

        if (cfg.cycle_csv) {
            csv << now << ',' << lic.size() << ',' << (ar.grants - (ar.rbe_granted ? rbe_req_words : 0)) << ','
                << rbe_req_words << ',' << (ar.rbe_granted ? 1 : 0) << ',' << (dma_in.idle() ? 0 : 1)
                << ',' << (dma_out.idle() ? 0 : 1) << ',' << (engine.idle() ? 0 : 1) << '\n';
        }
        if (progress) last_progress = now;
        ++now;
    }

    tr.total_cycles = now;
    for (const auto& c : cores) {
        tr.core_ids.push_back(c.id);
        tr.cores.push_back(c.core.trace());
        tr.total_cycles = std::max(tr.total_cycles, c.core.trace().cycles);
    }
    tr.bank_conflicts = arb.bank_conflicts();
    tr.barriers = events.barriers_released();
    if (cfg.cycle_csv) tr.cycle_csv = csv.str();
    return tr;
}

nlohmann::ordered_json ClusterTrace::to_json() const {
    nlohmann::ordered_json j;
    j["total_cycles"] = total_cycles;
    auto& cj = j["cores"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cores.size(); ++i) {
        auto t = nlohmann::ordered_json::parse(cores[i].to_json());
        t["id"] = core_ids[i];
        cj.push_back(t);
    }
    auto& m = j["masters"] = nlohmann::ordered_json::array();
    for (int k = 0; k < kNumLicMasters; ++k) {
        const std::string name = k < kNumCores ? "core" + std::to_string(k) : k == kMasterDmaIn ? "dma_in" : "dma_out";
        m.push_back({{"master", name}, {"grants", lic_grants[static_cast<std::size_t>(k)]},
                     {"stalls", lic_stalls[static_cast<std::size_t>(k)]}});
    }
    j["bank_conflicts"] = bank_conflicts;
    j["lic_words"] = lic_words;
    j["rbe_words"] = rbe_words;
    j["rbe_grants"] = rbe_grants;
    j["rbe_stalls"] = rbe_stalls;
    j["rbe_busy_cycles"] = rbe_busy_cycles;
    j["l2_core_accesses"] = l2_core_accesses;
    j["max_grants_per_cycle"] = max_grants_per_cycle;
    j["dma_busy_cycles"] = {{"in", dma_busy_cycles[0]}, {"out", dma_busy_cycles[1]}};
    auto& dj = j["dma_transfers"] = nlohmann::ordered_json::array();
    for (const auto& d : dma_transfers)
        dj.push_back({{"descriptor", d.index}, {"issue", d.issue}, {"start", d.start}, {"end", d.end}});
    auto& rj = j["rbe_jobs"] = nlohmann::ordered_json::array();
    for (const auto& r : rbe_jobs) {
        nlohmann::ordered_json e{{"job", r.when.index}, {"issue", r.when.issue}, {"start", r.when.start},
                                 {"end", r.when.end}};
        for (std::size_t p = 0; p < rbe::kNumPhases; ++p)
            e[std::string(rbe::to_string(static_cast<rbe::Phase>(p))) + "_cycles"] = r.report.phase_cycles[p];
        rj.push_back(e);
    }
    j["barriers"] = barriers;
    return j;
}

Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir, std::uint64_t seed) {
    Scenario s;
    try {
        std::mt19937_64 rng(seed);
        for (const auto& c : j.at("cores")) {
            std::string text;
            if (c.contains("asm")) {
                text = c.at("asm").get<std::string>();
            } else {
                const auto path = base_dir / c.at("program").get<std::string>();
                std::ifstream f(path);
                if (!f) throw ValidationError("cannot open program " + path.string());
                std::stringstream ss;
                ss << f.rdbuf();
                text = ss.str();
            }
            const auto prog = isa::assemble(text);
            std::vector<int> ids;
            if (c.contains("ids")) ids = c.at("ids").get<std::vector<int>>();
            else ids.push_back(c.value("id", 0));
            for (int id : ids) {
                CoreSetup cs{id, prog, {}};
                if (c.contains("regs"))
                    for (const auto& [name, v] : c.at("regs").items()) cs.regs[isa::parse_gpr(name)] = v.get<std::uint32_t>();
                s.cores.push_back(std::move(cs));
            }
        }
        for (const auto& m : j.value("memory", nlohmann::json::array())) {
            MemoryInit mi;
            mi.addr = m.at("addr").get<std::uint32_t>();
            if (m.contains("words")) {
                mi.words = m.at("words").get<std::vector<std::uint32_t>>();
            } else {
                mi.words.resize(m.at("random_words").get<std::size_t>());
                for (auto& w : mi.words) w = static_cast<std::uint32_t>(rng());
            }
            s.memory.push_back(std::move(mi));
        }
        for (const auto& r : j.value("rbe_jobs", nlohmann::json::array())) s.rbe_jobs.push_back(rbe::job_from_json(r));
        for (const auto& d : j.value("dma", nlohmann::json::array())) s.dma.push_back(dma_from_json(d));
        if (j.contains("config")) {
            const auto& c = j.at("config");
            s.config.max_cycles = c.value("max_cycles", s.config.max_cycles);
            s.config.deadlock_window = c.value("deadlock_window", s.config.deadlock_window);
            s.config.timing = c.value("timing", true);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scenario: ") + e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open scenario " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("scenario " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j, path.parent_path(), seed);
}

}  // namespace acs::cluster
