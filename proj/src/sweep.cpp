#include "stmrta/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "stmrta/seed.hpp"

namespace stmrta {

std::uint64_t scenario_seed(std::uint64_t seed_base, std::size_t task_count,
                            int iteration) {
  return mix_seed(seed_base, task_count, static_cast<std::uint64_t>(iteration));
}

std::uint64_t protocol_seed(std::uint64_t scenario_seed, const Strategy& strategy,
                            Transport transport) {
  return mix_seed(scenario_seed, fnv1a(strategy.name()), fnv1a(to_string(transport)));
}

std::vector<RunRow> run_sweep(const ExperimentConfig& cfg,
                              const std::optional<std::filesystem::path>& trace_dir) {
  validate(cfg);
  std::vector<RunRow> rows;
  for (const auto& s : cfg.strategies)
    for (auto tr : cfg.transports)
      for (auto tc : cfg.task_counts)
        for (int it = 0; it < cfg.iterations; ++it) {
          RunRow r;
          r.seed = scenario_seed(cfg.seed_base, tc, it);
          r.strategy = s;
          r.transport = tr;
          r.task_count = tc;
          r.iteration = it;
          rows.push_back(r);
        }
  if (trace_dir) std::filesystem::create_directories(*trace_dir);

  auto run_one = [&](RunRow& row) {
    const Scenario sc = generate_scenario(row.seed, cfg.robot_count, row.task_count,
                                          cfg.pattern, cfg.arena, cfg.deployment);
    MissionConfig m = cfg.mission;
    m.strategy = row.strategy;
    m.transport = row.transport;
    m.seed = protocol_seed(row.seed, row.strategy, row.transport);
    std::ofstream trace;
    if (trace_dir && row.transport == Transport::chaos) {
      std::ostringstream name;
      name << row.strategy.name() << '_' << row.task_count << "_it" << row.iteration << ".log";
      trace.open(*trace_dir / name.str());
      if (!trace) throw std::runtime_error("cannot write trace " + name.str());
      m.trace = &trace;
    }
    row.metrics = run_mission(sc, m);
  };

  unsigned workers = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(rows.size() ? rows.size() : 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
      try {
        run_one(rows[i]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = rows.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace {

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::fixed << std::setprecision(3);
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string series_name(const RunRow& r) {
  return r.strategy.name() + '-' + to_string(r.transport);
}

}  // namespace

void write_outputs(const ExperimentConfig& cfg, const std::vector<RunRow>& rows,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  const auto runs_path = out_dir / "runs.csv";
  auto runs = open_out(runs_path);
  runs << "seed,strategy,transport,task_count,iteration,makespan_ms,"
          "total_convergence_ms,mean_radio_on_ms,rounds_used,failed_rounds,"
          "dropped_entries\n";
  for (const auto& r : rows)
    runs << r.seed << ',' << r.strategy.name() << ',' << to_string(r.transport) << ','
         << r.task_count << ',' << r.iteration << ',' << r.metrics.makespan_ms << ','
         << r.metrics.total_convergence_ms << ',' << r.metrics.mean_radio_on_ms() << ','
         << r.metrics.rounds_used << ',' << r.metrics.failed_rounds << ','
         << r.metrics.dropped_entries << '\n';
  close_out(runs, runs_path);

  // Cells in first-appearance order, which is the sweep's nesting order.
  struct Cell {
    std::string series;
    std::string strategy;
    std::string transport;
    std::size_t task_count;
    std::vector<double> makespan, convergence, radio;
  };
  std::vector<Cell> cells;
  for (const auto& r : rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
      return c.series == series_name(r) && c.task_count == r.task_count;
    });
    if (it == cells.end()) {
      cells.push_back({series_name(r), r.strategy.name(), to_string(r.transport),
                       r.task_count, {}, {}, {}});
      it = std::prev(cells.end());
    }
    it->makespan.push_back(r.metrics.makespan_ms);
    it->convergence.push_back(r.metrics.total_convergence_ms);
    it->radio.push_back(r.metrics.mean_radio_on_ms());
  }

  const auto agg_path = out_dir / "aggregate.csv";
  auto agg = open_out(agg_path);
  agg << "strategy,transport,task_count,runs,makespan_mean_ms,makespan_sd_ms,"
         "convergence_mean_ms,convergence_sd_ms,radio_on_mean_ms,radio_on_sd_ms\n";
  for (const auto& c : cells) {
    const auto m = summarize(c.makespan), v = summarize(c.convergence), o = summarize(c.radio);
    agg << c.strategy << ',' << c.transport << ',' << c.task_count << ','
        << c.makespan.size() << ',' << m.mean << ',' << m.sd << ',' << v.mean << ','
        << v.sd << ',' << o.mean << ',' << o.sd << '\n';
  }
  close_out(agg, agg_path);

  std::vector<std::string> series;
  for (const auto& c : cells)
    if (std::find(series.begin(), series.end(), c.series) == series.end())
      series.push_back(c.series);

  auto write_dat = [&](const char* file, std::vector<double> Cell::*metric) {
    const auto path = out_dir / file;
    auto dat = open_out(path);
    dat << "# task_count";
    for (const auto& s : series) dat << ' ' << s << "_mean " << s << "_sd";
    dat << '\n';
    for (auto tc : cfg.task_counts) {
      dat << tc;
      for (const auto& s : series) {
        const auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
          return c.series == s && c.task_count == tc;
        });
        const Summary sm = it == cells.end() ? Summary{} : summarize((*it).*metric);
        dat << ' ' << sm.mean << ' ' << sm.sd;
      }
      dat << '\n';
    }
    close_out(dat, path);
  };
  write_dat("makespan.dat", &Cell::makespan);
  write_dat("convergence.dat", &Cell::convergence);
  write_dat("radio_on.dat", &Cell::radio);

  const auto header_path = out_dir / "run_header.txt";
  auto header = open_out(header_path);
  header << "# config as given\n" << cfg.source;
  if (!cfg.source.empty() && cfg.source.back() != '\n') header << '\n';
  header << "# resolved\n"
         << "robot_count = " << cfg.robot_count << '\n'
         << "task_counts = ";
  for (std::size_t i = 0; i < cfg.task_counts.size(); ++i)
    header << (i ? ", " : "") << cfg.task_counts[i];
  header << "\nstrategies = ";
  for (std::size_t i = 0; i < cfg.strategies.size(); ++i)
    header << (i ? ", " : "") << cfg.strategies[i].name();
  header << "\ntransports = ";
  for (std::size_t i = 0; i < cfg.transports.size(); ++i)
    header << (i ? ", " : "") << to_string(cfg.transports[i]);
  header << "\npattern = " << to_string(cfg.pattern.kind)
         << "\ninterval_ms = " << cfg.pattern.interval_ms
         << "\nseed_base = " << cfg.seed_base << "\niterations = " << cfg.iterations
         << "\nlayout = " << cfg.mission.layout.entries << " entries, "
         << cfg.mission.layout.flag_bytes << " flag bytes"
         << "\nmulti_packet = " << (cfg.mission.multi_packet ? "true" : "false")
         << "\nrobot_speed = " << cfg.mission.robot_speed
         << "\nbid_origin = " << to_string(cfg.mission.bid_origin)
         << "\nslot_ms = " << cfg.mission.round.slot_ms
         << "\nmax_slots = " << cfg.mission.round.max_slots
         << "\ncompletion_tx = " << cfg.mission.round.completion_tx
         << "\nradio_range = " << cfg.deployment.radio_range
         << "\ncapture_ratio = " << cfg.mission.round.radio.capture_ratio << '\n';
  close_out(header, header_path);
}

}  // namespace stmrta
