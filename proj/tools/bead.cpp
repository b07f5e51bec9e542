#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bead/bead.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void print_kv(std::ostream& out, const char* key, const std::string& value) {
  out << key << ',' << value << '\n';
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
  bead::ScenarioConfig cfg = bead::parse_scenario_file(config_path);
  bead::ResolvedScenario rs = bead::resolve_scenario(cfg, seed);
  bead::Simulator sim(rs.topo, rs.routes, rs.params);
  bead::Metrics metrics = sim.run();

  std::filesystem::create_directories(out_dir);
  auto open = [&out_dir](const char* file) {
    std::ofstream f(out_dir + "/" + file, std::ios::binary);
    if (!f) throw std::runtime_error(std::string("cannot write ") + file);
    return f;
  };
  {
    auto f = open("metrics.csv");
    bead::write_metrics_csv(metrics, f);
  }
  {
    auto f = open("erases.csv");
    bead::write_erases_csv(metrics, f);
  }
  {
    auto f = open("timings.csv");
    bead::write_timings_csv(metrics, f);
  }
  {
    auto f = open("manifest.txt");
    f << "seed = " << rs.params.seed << '\n';
    f << "config = " << std::filesystem::path(config_path).filename().string() << '\n';
    f << "config_digest = " << bead::sha256_hex_of_file(config_path) << '\n';
    f << "duration_s = " << bead::format_double(rs.params.duration_s) << '\n';
    f << "nodes = " << rs.topo.nodes().size() << '\n';
    f << "links = " << rs.topo.links().size() << '\n';
    f << "events = " << metrics.events_executed << '\n';
    f << "version = " << bead::kVersion << '\n';
  }

  bead::NodeTraffic t = metrics.totals();
  std::cout << "nodes," << rs.topo.nodes().size() << '\n'
            << "events," << metrics.events_executed << '\n'
            << "total_out_data_bytes," << t.out_data << '\n'
            << "total_out_erase_bytes," << t.out_erase << '\n';
  if (t.out_data > 0) {
    std::cout << "erase_to_data_ratio,"
              << bead::format_double(static_cast<double>(t.out_erase) /
                                     static_cast<double>(t.out_data))
              << '\n';
  }
  std::cout << "outputs," << out_dir << "/{metrics,erases,timings}.csv" << '\n';
  return kExitOk;
}

int cmd_analyze_saturation(const std::string& storage, const std::string& entry, double rate) {
  std::uint64_t storage_bytes = bead::parse_bytes(storage);
  std::uint64_t entry_bytes = bead::parse_bytes(entry);
  if (entry_bytes == 0) throw std::invalid_argument("entry size must be positive");
  double capacity = static_cast<double>(storage_bytes) / static_cast<double>(entry_bytes);
  double t = bead::saturation_time(capacity, rate);
  print_kv(std::cout, "storage_bytes", std::to_string(storage_bytes));
  print_kv(std::cout, "entry_bytes", std::to_string(entry_bytes));
  print_kv(std::cout, "capacity_entries", std::to_string(static_cast<std::uint64_t>(capacity)));
  print_kv(std::cout, "rate_per_s", bead::format_double(rate));
  print_kv(std::cout, "saturation_s", bead::format_double(t));
  return kExitOk;
}

int cmd_analyze_bloom(const std::string& m, double n, std::size_t k_flag, std::size_t k_max,
                      double rate) {
  double m_bits = static_cast<double>(bead::parse_bytes(m)) * 8.0;
  std::size_t k = k_flag > 0 ? k_flag : bead::optimal_k(m_bits, n, k_max);
  double fp = bead::false_positive_rate(m_bits, n);
  print_kv(std::cout, "m_bits", bead::format_double(m_bits));
  print_kv(std::cout, "n_elements", bead::format_double(n));
  print_kv(std::cout, "bits_per_element", bead::format_double(m_bits / n));
  print_kv(std::cout, "optimal_k", std::to_string(k));
  {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::scientific << std::setprecision(6) << fp;
    print_kv(std::cout, "false_positive_rate", os.str());
  }
  if (rate > 0) {
    print_kv(std::cout, "bloom_saturation_s",
             bead::format_double(bead::bloom_saturation_time(m_bits, static_cast<double>(k), rate)));
  }
  return kExitOk;
}

int cmd_analyze_marking(std::size_t height) {
  if (height < 1) throw std::invalid_argument("height must be >= 1");
  // Two conventions, both reported: the per-interest figure counts `height`
  // marking hops on one path; the aggregate uses the tree model where each of
  // the 2^h paths crosses h-1 marking routers.
  print_kv(std::cout, "height", std::to_string(height));
  print_kv(std::cout, "per_trace_bytes", std::to_string(bead::TraceTuple::kWireSize));
  print_kv(std::cout, "per_interest_overhead_bytes",
           std::to_string(bead::TraceTuple::kWireSize * height));
  std::uint64_t aggregate = bead::aggregated_trace_size(height);
  print_kv(std::cout, "aggregated_trace_bytes", std::to_string(aggregate));
  print_kv(std::cout, "aggregated_trace_mib",
           bead::format_double(static_cast<double>(aggregate) / (1024.0 * 1024.0)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"content-centric network simulator with best-effort content deletion"};
  app.set_version_flag("--version", std::string("bead ") + bead::kVersion);
  app.require_subcommand(0, 1);

  // run
  auto* run = app.add_subcommand("run", "execute a scenario and write metrics");
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_value = 0;
  run->add_option("--config", config_path, "scenario file")->required();
  auto* seed_opt = run->add_option("--seed", seed_value, "override the scenario seed");
  run->add_option("--out", out_dir, "output directory (default: out)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "analytical calculators");
  analyze->require_subcommand(1);

  auto* sat = analyze->add_subcommand("saturation", "lossless history fill time");
  std::string sat_storage, sat_entry = "32B";
  double sat_rate = 0;
  sat->add_option("--storage", sat_storage, "history memory (e.g. 4GiB)")->required();
  sat->add_option("--entry", sat_entry, "bytes per entry (default 32B)");
  sat->add_option("--rate", sat_rate, "inserts per second")->required();

  auto* bloom = analyze->add_subcommand("bloom", "filter tuning via k = ln2 * m/n");
  std::string bloom_m;
  double bloom_n = 0, bloom_rate = 0;
  std::size_t bloom_k = 0, bloom_k_max = 256;
  bloom->add_option("--m", bloom_m, "filter memory (e.g. 4GiB)")->required();
  bloom->add_option("--n", bloom_n, "expected elements")->required();
  bloom->add_option("--k", bloom_k, "fix k instead of deriving it");
  bloom->add_option("--k-max", bloom_k_max, "upper bound for derived k");
  bloom->add_option("--rate", bloom_rate, "inserts per second (adds saturation estimate)");

  auto* marking = analyze->add_subcommand("marking", "trace size arithmetic");
  std::size_t marking_height = 0;
  marking->add_option("--height", marking_height, "tree height / marking hops")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_run(config_path, seed, out_dir);
    }
    if (analyze->parsed()) {
      if (sat->parsed()) return cmd_analyze_saturation(sat_storage, sat_entry, sat_rate);
      if (bloom->parsed()) return cmd_analyze_bloom(bloom_m, bloom_n, bloom_k, bloom_k_max,
                                                    bloom_rate);
      if (marking->parsed()) return cmd_analyze_marking(marking_height);
    }
    std::cerr << app.help() << std::flush;
    return kExitConfig;
  } catch (const bead::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bead::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bead::ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
