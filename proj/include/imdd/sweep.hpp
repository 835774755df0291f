// Copyright 2026 The imdd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "imdd/ann.hpp"
#include "imdd/ber.hpp"
#include "imdd/channel.hpp"
#include "imdd/classical.hpp"
#include "imdd/link.hpp"
#include "imdd/rng.hpp"
#include "imdd/snn.hpp"
#include "imdd/types.hpp"

namespace imdd {

// Noise-sweep protocol: which levels, how many restarts, how long to train,
// and when a BER measurement may stop.
struct SweepSchedule {
  std::vector<double> levels_db = {-8, -7, -6, -5, -4, -3, -2, -1, 0};
  int seeds = 5;
  int epochs_per_level = 100;
  int patience = 100;     // epochs without validation improvement before moving on
  int val_symbols = 2000;
  long min_errors = 2000;
  long max_bits = 1'000'000'000;
  double confidence = 0.99;
  double target_ber = 2e-3;

  void validate() const {
    if (levels_db.empty()) throw std::invalid_argument("SweepSchedule: no noise levels");
    if (seeds < 1 || epochs_per_level < 1 || patience < 1)
      throw std::invalid_argument("SweepSchedule: bad training budget");
    if (val_symbols < 16 || min_errors < 1 || max_bits < 1)
      throw std::invalid_argument("SweepSchedule: bad evaluation budget");
    if (confidence <= 0 || confidence >= 1 || target_ber <= 0 || target_ber >= 1)
      throw std::invalid_argument("SweepSchedule: bad statistics settings");
  }
};

struct TrainSettings {
  double ann_lr = 1e-3;
  int ann_batch = 256;
  double ann_init_gain = 1.0;
  double snn_lr = 1e-3;
  int snn_batch = 256;
  double snn_init_gain = 1.0;

  void validate() const {
    if (ann_lr <= 0 || snn_lr <= 0 || ann_batch < 1 || snn_batch < 1 ||
        ann_init_gain <= 0 || snn_init_gain <= 0)
      throw std::invalid_argument("TrainSettings: bad values");
  }
};

// Everything a run needs; a config file maps onto this one-to-one.
struct RunConfig {
  LinkParams link;
  SnnParams snn;
  TrainSettings train;
  SweepSchedule sweep;
  std::vector<std::string> demappers = {"LE1", "LE7", "VNLE", "ANN", "SNN"};
  std::uint64_t root_seed = 1;

  void validate() const {
    link.validate();
    snn.validate();
    train.validate();
    sweep.validate();
    if (demappers.empty()) throw std::invalid_argument("RunConfig: no demappers");
  }
};

inline double ber_of(const VecXi& pred, const VecXi& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("ber_of: size mismatch");
  long e = 0;
  for (Index i = 0; i < pred.size(); ++i) e += bit_errors(pred[i], truth[i]);
  return double(e) / double(2 * pred.size());
}

// A fitted model of any family, ready to decide windows.
using AnyModel = std::variant<ClassicalDemapper, AnnModel<double>, SnnModel<double>>;

inline VecXi any_demap(const AnyModel& m, const MatXd& chunks) {
  return std::visit(
      [&](const auto& model) -> VecXi {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, SnnModel<double>>) {
          const VecXi dummy = VecXi::Zero(chunks.rows());
          return snn_demap(model, encode_spikes(chunks, dummy, model.p));
        } else {
          return model.demap(chunks);
        }
      },
      m);
}

inline int any_n_tap(const AnyModel& m) {
  return std::visit(
      [](const auto& model) -> int {
        using M = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<M, SnnModel<double>>)
          return model.p.n_tap;
        else
          return model.n_tap;
      },
      m);
}

// Trainable demappers share one curriculum driver through this interface.
class Trainable {
 public:
  virtual ~Trainable() = default;
  virtual int n_tap() const = 0;
  virtual void init(Rng& rng) = 0;                       // fresh weights
  virtual void begin_level() = 0;                        // fresh optimiser state
  virtual void set_frame(const LabeledDataset& d) = 0;   // current training frame
  virtual double train_epoch(Rng& shuffle) = 0;          // one pass, mean loss
  virtual std::vector<MatXd> snapshot() const = 0;
  virtual void restore(const std::vector<MatXd>& snap) = 0;
  virtual VecXi demap(const MatXd& chunks) const = 0;
  virtual AnyModel export_model() const = 0;
};

class AnnTrainable final : public Trainable {
 public:
  explicit AnnTrainable(const TrainSettings& ts) : ts_(ts) {}

  int n_tap() const override { return model_.n_tap; }

  void init(Rng& rng) override {
    model_.init(rng, ts_.ann_init_gain);
    standardiser_set_ = false;
    opt_.reset();
  }

  void begin_level() override {
    opt_ = std::make_unique<Adam<double>>(model_.params(),
                                          AdamConfig<double>{ts_.ann_lr});
  }

  void set_frame(const LabeledDataset& d) override {
    if (!standardiser_set_) {
      model_.fit_standardiser(d.chunks);
      standardiser_set_ = true;
    }
    chunks_ = d.chunks;
    labels_ = d.labels;
  }

  double train_epoch(Rng& shuffle) override {
    return ann_train_epoch(model_, chunks_, labels_, *opt_, ts_.ann_batch, shuffle);
  }

  std::vector<MatXd> snapshot() const override {
    std::vector<MatXd> s;
    for (const auto& l : model_.layers) {
      s.push_back(l.W.value);
      s.push_back(l.b.value);
    }
    s.emplace_back(model_.in_mean);
    s.emplace_back(model_.in_scale);
    return s;
  }

  void restore(const std::vector<MatXd>& s) override {
    size_t k = 0;
    for (auto& l : model_.layers) {
      l.W.value = s[k++];
      l.b.value = s[k++];
    }
    model_.in_mean = s[k++].col(0);
    model_.in_scale = s[k++].col(0);
    standardiser_set_ = true;
  }

  VecXi demap(const MatXd& chunks) const override { return model_.demap(chunks); }

  AnyModel export_model() const override { return model_; }

 private:
  TrainSettings ts_;
  AnnModel<double> model_;
  std::unique_ptr<Adam<double>> opt_;
  MatXd chunks_;
  VecXi labels_;
  bool standardiser_set_ = false;
};

class SnnTrainable final : public Trainable {
 public:
  SnnTrainable(const SnnParams& p, const TrainSettings& ts) : ts_(ts) { model_.p = p; }

  int n_tap() const override { return model_.p.n_tap; }

  void init(Rng& rng) override {
    model_.init(rng, ts_.snn_init_gain);
    opt_.reset();
  }

  void begin_level() override {
    opt_ = std::make_unique<Adam<double>>(model_.params(),
                                          AdamConfig<double>{ts_.snn_lr});
  }

  void set_frame(const LabeledDataset& d) override {
    enc_ = encode_spikes(d.chunks, d.labels, model_.p);
  }

  double train_epoch(Rng& shuffle) override {
    return snn_train_epoch(model_, enc_, *opt_, ts_.snn_batch, shuffle);
  }

  std::vector<MatXd> snapshot() const override {
    return {model_.w_ih.value, model_.w_ho.value};
  }

  void restore(const std::vector<MatXd>& s) override {
    model_.w_ih.value = s[0];
    model_.w_ho.value = s[1];
  }

  VecXi demap(const MatXd& chunks) const override {
    const VecXi dummy = VecXi::Zero(chunks.rows());
    return snn_demap(model_, encode_spikes(chunks, dummy, model_.p));
  }

  AnyModel export_model() const override { return model_; }

 private:
  TrainSettings ts_;
  SnnModel<double> model_;
  std::unique_ptr<Adam<double>> opt_;
  EncodedDataset enc_;
};

inline std::unique_ptr<Trainable> make_trainable(const std::string& name,
                                                 const RunConfig& cfg) {
  if (name == "ANN") return std::make_unique<AnnTrainable>(cfg.train);
  if (name == "SNN") return std::make_unique<SnnTrainable>(cfg.snn, cfg.train);
  throw std::invalid_argument("make_trainable: unknown demapper " + name);
}

struct TrainLogRow {
  std::string demapper;
  int seed = 0;
  double noise_db = 0.0;
  int epoch = 0;
  double loss = 0.0;
  double val_ber = 0.0;
};

// Winner of the restart tournament for one (demapper, level).
struct Champion {
  std::string demapper;
  double noise_db = 0.0;
  int seed = 0;
  double val_ber = 1.0;
  AnyModel model;
};

struct SweepResult {
  std::vector<BerRecord> records;  // one per (demapper, level)
  std::vector<Champion> champions;
  std::vector<TrainLogRow> train_log;
};

namespace detail {

inline LabeledDataset draw_labeled(std::uint64_t frame_seed, std::uint64_t noise_seed,
                                   const LinkParams& link, int symbols,
                                   double noise_db, int n_tap) {
  Rng frame_rng(frame_seed);
  Rng noise_rng(noise_seed);
  LinkParams p = link;
  p.frame_symbols = symbols;
  const SymbolFrame frame = draw_symbol_frame(symbols, frame_rng);
  return make_dataset(frame, p, noise_db, n_tap, noise_rng);
}

}  // namespace detail

// Classical demappers have a closed-form fit: refit from scratch on one
// fresh frame per (seed, level), keep the restart with the best validation
// BER (ties go to the lower seed index).
inline std::vector<Champion> classical_sweep(const std::string& name, int n_tap,
                                             int order, const RunConfig& cfg,
                                             std::ostream* progress = nullptr) {
  std::vector<Champion> out;
  for (size_t li = 0; li < cfg.sweep.levels_db.size(); ++li) {
    const double level = cfg.sweep.levels_db[li];
    Champion champ;
    champ.demapper = name;
    champ.noise_db = level;
    champ.val_ber = std::numeric_limits<double>::infinity();
    for (int s = 0; s < cfg.sweep.seeds; ++s) {
      const std::uint64_t base = substream(cfg.root_seed, "seed", s);
      const LabeledDataset train = detail::draw_labeled(
          substream(base, "train-frame", li, 0), substream(base, "train-noise", li, 0),
          cfg.link, cfg.link.frame_symbols, level, n_tap);
      const LabeledDataset val = detail::draw_labeled(
          substream(base, "val-frame", li, 0), substream(base, "val-noise", li, 0),
          cfg.link, cfg.sweep.val_symbols, level, n_tap);
      const ClassicalDemapper model = fit_classical(train.chunks, train.labels, order);
      const double ber = ber_of(model.demap(val.chunks), val.labels);
      if (ber < champ.val_ber) {
        champ.val_ber = ber;
        champ.seed = s;
        champ.model = model;
      }
    }
    if (progress)
      (*progress) << name << " level " << level << " dB: fitted, val ber "
                  << champ.val_ber << " (seed " << champ.seed << ")\n";
    out.push_back(std::move(champ));
  }
  return out;
}

// Gradient-trained demappers run a noise curriculum per seed: levels are
// visited from quiet to noisy, every epoch sees a freshly simulated frame,
// the best-validation checkpoint of a level is restored before moving to
// the next (warm start) and the optimiser state is rebuilt per level.
inline std::vector<Champion> neural_sweep(const std::string& name,
                                          const RunConfig& cfg,
                                          std::vector<TrainLogRow>* log,
                                          std::ostream* progress = nullptr) {
  const size_t n_levels = cfg.sweep.levels_db.size();
  struct SeedLevel {
    double val_ber = std::numeric_limits<double>::infinity();
    std::vector<MatXd> snap;
  };
  std::vector<std::vector<SeedLevel>> results(
      cfg.sweep.seeds, std::vector<SeedLevel>(n_levels));

  for (int s = 0; s < cfg.sweep.seeds; ++s) {
    const std::uint64_t base = substream(cfg.root_seed, "seed", s);
    std::unique_ptr<Trainable> t = make_trainable(name, cfg);
    Rng init_rng(substream(base, "init"));
    t->init(init_rng);
    for (size_t li = 0; li < n_levels; ++li) {
      const double level = cfg.sweep.levels_db[li];
      t->begin_level();
      SeedLevel best;
      int stall = 0;
      for (int ep = 0; ep < cfg.sweep.epochs_per_level; ++ep) {
        const LabeledDataset train = detail::draw_labeled(
            substream(base, "train-frame", li, ep),
            substream(base, "train-noise", li, ep), cfg.link,
            cfg.link.frame_symbols, level, t->n_tap());
        t->set_frame(train);
        Rng shuffle(substream(base, "shuffle", li, ep));
        const double loss = t->train_epoch(shuffle);
        const LabeledDataset val = detail::draw_labeled(
            substream(base, "val-frame", li, ep), substream(base, "val-noise", li, ep),
            cfg.link, cfg.sweep.val_symbols, level, t->n_tap());
        const double ber = ber_of(t->demap(val.chunks), val.labels);
        if (log) log->push_back({name, s, level, ep, loss, ber});
        if (ber < best.val_ber) {
          best.val_ber = ber;
          best.snap = t->snapshot();
          stall = 0;
        } else if (++stall >= cfg.sweep.patience) {
          break;
        }
      }
      t->restore(best.snap);
      results[s][li] = std::move(best);
      if (progress)
        (*progress) << name << " seed " << s << " level " << level
                    << " dB: best val ber " << results[s][li].val_ber << "\n";
    }
  }

  std::vector<Champion> out;
  std::unique_ptr<Trainable> mould = make_trainable(name, cfg);
  for (size_t li = 0; li < n_levels; ++li) {
    int win = 0;
    for (int s = 1; s < cfg.sweep.seeds; ++s)
      if (results[s][li].val_ber < results[win][li].val_ber) win = s;
    Rng init_rng(substream(substream(cfg.root_seed, "seed", win), "init"));
    mould->init(init_rng);  // shapes only; restore overwrites every value
    mould->restore(results[win][li].snap);
    Champion champ;
    champ.demapper = name;
    champ.noise_db = cfg.sweep.levels_db[li];
    champ.seed = win;
    champ.val_ber = results[win][li].val_ber;
    champ.model = mould->export_model();
    out.push_back(std::move(champ));
  }
  return out;
}

// Measure every champion with freshly simulated frames; the per-level frame
// streams are shared across demappers, so curves are paired.
inline std::vector<BerRecord> evaluate_champions(const std::vector<Champion>& champions,
                                                 const RunConfig& cfg,
                                                 std::ostream* progress = nullptr) {
  EvalSettings es;
  es.min_errors = cfg.sweep.min_errors;
  es.max_bits = cfg.sweep.max_bits;
  es.confidence = cfg.sweep.confidence;
  std::vector<BerRecord> records;
  for (const Champion& c : champions) {
    Index li = -1;
    for (size_t i = 0; i < cfg.sweep.levels_db.size(); ++i)
      if (cfg.sweep.levels_db[i] == c.noise_db) li = static_cast<Index>(i);
    if (li < 0) throw std::logic_error("evaluate_champions: level not on the grid");
    const AnyModel& model = c.model;
    BerRecord rec = evaluate_ber_until(
        [&model](const MatXd& chunks) { return any_demap(model, chunks); },
        any_n_tap(model), cfg.link, c.noise_db, li, cfg.root_seed, es);
    rec.demapper = c.demapper;
    rec.seed = c.seed;
    records.push_back(rec);
    if (progress)
      (*progress) << c.demapper << " level " << c.noise_db << " dB: ber " << rec.ber
                  << " (" << rec.errors << "/" << rec.bits << " bits"
                  << (rec.censored ? ", censored" : "") << ")\n";
  }
  return records;
}

// The whole study: fit/train every requested demapper over the noise grid,
// pick champions, and measure their BER curves.
inline SweepResult run_noise_sweep(const RunConfig& cfg,
                                   std::ostream* progress = nullptr) {
  cfg.validate();
  SweepResult result;
  for (const std::string& name : cfg.demappers) {
    std::vector<Champion> champs;
    if (name == "LE1")
      champs = classical_sweep(name, 1, 1, cfg, progress);
    else if (name == "LE7")
      champs = classical_sweep(name, 7, 1, cfg, progress);
    else if (name == "VNLE")
      champs = classical_sweep(name, 7, 5, cfg, progress);
    else if (name == "ANN" || name == "SNN")
      champs = neural_sweep(name, cfg, &result.train_log, progress);
    else
      throw std::invalid_argument("run_noise_sweep: unknown demapper " + name);
    std::vector<BerRecord> recs = evaluate_champions(champs, cfg, progress);
    result.records.insert(result.records.end(), recs.begin(), recs.end());
    result.champions.insert(result.champions.end(),
                            std::make_move_iterator(champs.begin()),
                            std::make_move_iterator(champs.end()));
  }
  return result;
}

// Noise tolerated at the target BER, per demapper, and the pairwise margins.
struct GainReport {
  double target_ber = 2e-3;
  std::map<std::string, double> crossing_db;

  // How much more noise `subject` tolerates than `reference` at the target
  // BER (positive = subject is better).  NaN when either curve never
  // crosses the target.
  double gain_db(const std::string& reference,
                 const std::string& subject = "SNN") const {
    const auto a = crossing_db.find(subject);
    const auto b = crossing_db.find(reference);
    if (a == crossing_db.end() || b == crossing_db.end()) return std::nan("");
    return a->second - b->second;
  }
};

inline GainReport gain_report(const std::vector<BerRecord>& records, double target) {
  std::map<std::string, std::vector<BerRecord>> curves;
  for (const BerRecord& r : records) curves[r.demapper].push_back(r);
  GainReport rep;
  rep.target_ber = target;
  for (const auto& [name, curve] : curves)
    rep.crossing_db[name] = crossing_noise_db(curve, target);
  return rep;
}

}  // namespace imdd
