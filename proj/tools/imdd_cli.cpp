// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: simulate the link, fit or train demappers, measure
// BER curves and render the report.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imdd/io.hpp"
#include "imdd/svg.hpp"
#include "imdd/sweep.hpp"

namespace fs = std::filesystem;
using namespace imdd;

namespace {

struct ConfigOpts {
  std::string config_path;
  std::vector<std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "configuration file (key = value lines)")
        ->check(CLI::ExistingFile);
    app->add_option("--set", overrides,
                    "override one configuration key, e.g. --set sweep.seeds=3");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
      config_set(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
  }
};

int classical_order(const std::string& name) {
  if (name == "LE1" || name == "LE7") return 1;
  if (name == "VNLE") return 5;
  throw CLI::ValidationError("--demapper", "expected LE1, LE7 or VNLE, got '" + name + "'");
}

int classical_taps(const std::string& name) { return name == "LE1" ? 1 : 7; }

void write_gain_report(std::ostream& os, const std::vector<BerRecord>& records,
                       double target) {
  const GainReport rep = gain_report(records, target);
  os << "noise tolerated at BER " << fmt_g(target) << ":\n";
  for (const auto& [name, db] : rep.crossing_db) {
    os << "  " << name << ": ";
    if (std::isnan(db))
      os << "curve does not cross the target\n";
    else
      os << fmt_g(db) << " dB\n";
  }
  if (rep.crossing_db.count("SNN")) {
    for (const std::string ref : {"LE7", "ANN", "VNLE"}) {
      if (!rep.crossing_db.count(ref)) continue;
      const double g = rep.gain_db(ref);
      os << "  SNN vs " << ref << ": "
         << (std::isnan(g) ? std::string("n/a") : fmt_g(g) + " dB") << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Joint equalisation and demapping study for a simulated PAM4 short-reach "
      "optical link"};
  app.require_subcommand(1);

  // --------------------------------------------------------------- simulate
  auto* sim = app.add_subcommand("simulate", "simulate frames and export them as CSV");
  ConfigOpts sim_cfg;
  sim_cfg.attach(sim);
  double sim_noise = -4.0;
  std::uint64_t sim_seed = 1;
  int sim_symbols = 0;
  std::string sim_out = "dataset.csv";
  sim->add_option("--noise-db", sim_noise, "noise power in dB (-inf for none)");
  sim->add_option("--seed", sim_seed, "seed of the frame/noise substreams");
  sim->add_option("--symbols", sim_symbols, "symbols to draw (default: config frame size)");
  sim->add_option("-o,--output", sim_out, "output CSV path");

  // -------------------------------------------------------------------- fit
  auto* fit = app.add_subcommand("fit", "fit a classical demapper on simulated frames");
  ConfigOpts fit_cfg;
  fit_cfg.attach(fit);
  std::string fit_name = "VNLE";
  double fit_noise = -4.0;
  std::uint64_t fit_seed = 1;
  std::string fit_out = "model.txt";
  std::string fit_data;
  fit->add_option("--demapper", fit_name, "LE1, LE7 or VNLE");
  fit->add_option("--noise-db", fit_noise, "noise power in dB");
  fit->add_option("--seed", fit_seed, "seed of the training frame");
  fit->add_option("--data", fit_data, "fit on an exported dataset CSV instead")
      ->check(CLI::ExistingFile);
  fit->add_option("-o,--output", fit_out, "output model path");

  // ------------------------------------------------------------------ train
  auto* train = app.add_subcommand(
      "train", "run the multi-restart noise curriculum for a trainable demapper");
  ConfigOpts train_cfg;
  train_cfg.attach(train);
  std::string train_name = "SNN";
  std::string train_dir = "out";
  train->add_option("--demapper", train_name, "ANN or SNN");
  train->add_option("-o,--out-dir", train_dir, "output directory");

  // --------------------------------------------------------------- evaluate
  auto* eval = app.add_subcommand("evaluate", "measure the BER of a stored model");
  ConfigOpts eval_cfg;
  eval_cfg.attach(eval);
  std::string eval_model;
  std::string eval_name = "model";
  std::string eval_out;
  std::vector<double> eval_levels;
  eval->add_option("--model", eval_model, "model file")->required()->check(CLI::ExistingFile);
  eval->add_option("--name", eval_name, "demapper name for the records");
  eval->add_option("--noise-db", eval_levels, "noise levels to measure (default: config grid)");
  eval->add_option("-o,--output", eval_out, "records CSV path (default: stdout)");

  // ------------------------------------------------------------------ sweep
  auto* sweep = app.add_subcommand(
      "sweep", "full study: fit/train every demapper over the noise grid and measure BER");
  ConfigOpts sweep_cfg;
  sweep_cfg.attach(sweep);
  std::string sweep_dir = "out";
  bool sweep_quiet = false;
  sweep->add_option("-o,--out-dir", sweep_dir, "output directory");
  sweep->add_flag("-q,--quiet", sweep_quiet, "suppress progress lines");

  // ----------------------------------------------------------------- report
  auto* report = app.add_subcommand("report", "gain summary and plot from a records CSV");
  ConfigOpts report_cfg;
  report_cfg.attach(report);
  std::string report_records = "out/records.csv";
  std::string report_svg;
  report->add_option("--records", report_records, "records CSV produced by sweep/evaluate")
      ->check(CLI::ExistingFile);
  report->add_option("--svg", report_svg, "write the BER plot to this SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const RunConfig cfg = sim_cfg.resolve();
      const int n = sim_symbols > 0 ? sim_symbols : cfg.link.frame_symbols;
      Rng frame_rng(substream(cfg.root_seed, "cli-frame", sim_seed));
      Rng noise_rng(substream(cfg.root_seed, "cli-noise", sim_seed));
      const SymbolFrame frame = draw_symbol_frame(n, frame_rng);
      LinkParams link = cfg.link;
      link.frame_symbols = n;
      const RxSamples rx = simulate_link(frame, link, sim_noise, noise_rng);
      std::ofstream os(sim_out);
      if (!os) throw std::runtime_error("cannot write " + sim_out);
      write_dataset_csv(os, frame, rx, link, sim_noise);
      std::cerr << "wrote " << n << " symbols to " << sim_out << "\n";
    } else if (*fit) {
      const RunConfig cfg = fit_cfg.resolve();
      const int order = classical_order(fit_name);
      const int n_tap = classical_taps(fit_name);
      MatXd chunks;
      VecXi labels;
      if (!fit_data.empty()) {
        std::ifstream is(fit_data);
        const DatasetCsv data = read_dataset_csv(is);
        chunks = extract_chunks(data.rx, n_tap);
        labels = data.index.segment(n_tap / 2, chunks.rows());
      } else {
        const std::uint64_t base = substream(cfg.root_seed, "seed", fit_seed);
        Rng frame_rng(substream(base, "train-frame", 0, 0));
        Rng noise_rng(substream(base, "train-noise", 0, 0));
        const SymbolFrame frame = draw_symbol_frame(cfg.link.frame_symbols, frame_rng);
        const LabeledDataset d = make_dataset(frame, cfg.link, fit_noise, n_tap, noise_rng);
        chunks = d.chunks;
        labels = d.labels;
      }
      const ClassicalDemapper model = fit_classical(chunks, labels, order);
      save_model_file(fit_out, model);
      const double train_ber = ber_of(model.demap(chunks), labels);
      std::cerr << fit_name << " fitted on " << labels.size() << " symbols, training ber "
                << fmt_g(train_ber) << (model.rank_deficient ? " (rank deficient)" : "")
                << "; model written to " << fit_out << "\n";
    } else if (*train) {
      const RunConfig cfg = train_cfg.resolve();
      if (train_name != "ANN" && train_name != "SNN")
        throw CLI::ValidationError("--demapper", "expected ANN or SNN");
      fs::create_directories(train_dir);
      std::vector<TrainLogRow> log;
      const std::vector<Champion> champs =
          neural_sweep(train_name, cfg, &log, &std::cerr);
      fs::create_directories(fs::path(train_dir) / "models");
      for (const Champion& c : champs)
        save_model_file((fs::path(train_dir) / "models" /
                         (c.demapper + "_" + fmt_g(c.noise_db) + "dB.txt"))
                            .string(),
                        c.model);
      std::ofstream log_os(fs::path(train_dir) / "train_log.csv");
      write_train_log_csv(log_os, log);
      save_config((fs::path(train_dir) / "resolved.cfg").string(), cfg);
      std::cerr << "wrote " << champs.size() << " champion models to " << train_dir
                << "/models\n";
    } else if (*eval) {
      const RunConfig cfg = eval_cfg.resolve();
      const AnyModel model = load_model_file(eval_model);
      std::vector<double> levels = eval_levels.empty() ? cfg.sweep.levels_db : eval_levels;
      EvalSettings es;
      es.min_errors = cfg.sweep.min_errors;
      es.max_bits = cfg.sweep.max_bits;
      es.confidence = cfg.sweep.confidence;
      std::vector<BerRecord> records;
      for (size_t li = 0; li < levels.size(); ++li) {
        BerRecord rec = evaluate_ber_until(
            [&model](const MatXd& chunks) { return any_demap(model, chunks); },
            any_n_tap(model), cfg.link, levels[li], static_cast<Index>(li),
            cfg.root_seed, es);
        rec.demapper = eval_name;
        records.push_back(rec);
        std::cerr << eval_name << " at " << levels[li] << " dB: ber " << fmt_g(rec.ber)
                  << (rec.censored ? " (censored)" : "") << "\n";
      }
      if (eval_out.empty()) {
        write_records_csv(std::cout, records);
      } else {
        std::ofstream os(eval_out);
        if (!os) throw std::runtime_error("cannot write " + eval_out);
        write_records_csv(os, records);
      }
    } else if (*sweep) {
      const RunConfig cfg = sweep_cfg.resolve();
      fs::create_directories(sweep_dir);
      fs::create_directories(fs::path(sweep_dir) / "models");
      save_config((fs::path(sweep_dir) / "resolved.cfg").string(), cfg);
      const SweepResult result = run_noise_sweep(cfg, sweep_quiet ? nullptr : &std::cerr);
      {
        std::ofstream os(fs::path(sweep_dir) / "records.csv");
        write_records_csv(os, result.records);
      }
      {
        std::ofstream os(fs::path(sweep_dir) / "train_log.csv");
        write_train_log_csv(os, result.train_log);
      }
      for (const Champion& c : result.champions)
        save_model_file((fs::path(sweep_dir) / "models" /
                         (c.demapper + "_" + fmt_g(c.noise_db) + "dB.txt"))
                            .string(),
                        c.model);
      write_ber_svg_file((fs::path(sweep_dir) / "curves.svg").string(), result.records,
                         cfg.sweep.target_ber);
      {
        std::ofstream os(fs::path(sweep_dir) / "report.txt");
        write_gain_report(os, result.records, cfg.sweep.target_ber);
      }
      write_gain_report(std::cout, result.records, cfg.sweep.target_ber);
      std::cerr << "sweep outputs written to " << sweep_dir << "\n";
    } else if (*report) {
      const RunConfig cfg = report_cfg.resolve();
      std::ifstream is(report_records);
      if (!is) throw std::runtime_error("cannot open " + report_records);
      const std::vector<BerRecord> records = read_records_csv(is);
      if (!report_svg.empty())
        write_ber_svg_file(report_svg, records, cfg.sweep.target_ber);
      write_gain_report(std::cout, records, cfg.sweep.target_ber);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
