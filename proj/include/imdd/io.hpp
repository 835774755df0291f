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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "imdd/sweep.hpp"

namespace imdd {

// ---------------------------------------------------------------------------
// Small text helpers

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Hexadecimal float: exact round trip for stored models.
inline std::string fmt_hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

// Accepts both hex-float ("0x1.8p+1") and plain decimal notation.
inline double parse_hex(const std::string& s) { return parse_double(s); }

// ---------------------------------------------------------------------------
// Run configuration: a flat "key = value" file mapping 1:1 onto RunConfig.

namespace detail {

struct ConfigField {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

inline const std::vector<std::pair<std::string, ConfigField>>& config_fields() {
  using F = ConfigField;
  static const std::vector<std::pair<std::string, F>> fields = [] {
    std::vector<std::pair<std::string, F>> f;
    auto add_d = [&f](const char* key, auto get_ref) {
      f.push_back({key, F{[get_ref](const RunConfig& c) { return fmt_g(get_ref(const_cast<RunConfig&>(c))); },
                          [get_ref](RunConfig& c, const std::string& v) { get_ref(c) = parse_double(v); }}});
    };
    auto add_i = [&f](const char* key, auto get_ref) {
      f.push_back({key, F{[get_ref](const RunConfig& c) { return std::to_string(get_ref(const_cast<RunConfig&>(c))); },
                          [get_ref](RunConfig& c, const std::string& v) {
                            get_ref(c) = static_cast<std::remove_reference_t<decltype(get_ref(c))>>(parse_long(v));
                          }}});
    };

    add_d("link.baud_rate", [](RunConfig& c) -> double& { return c.link.baud_rate; });
    add_d("link.wavelength", [](RunConfig& c) -> double& { return c.link.wavelength; });
    add_d("link.dispersion", [](RunConfig& c) -> double& { return c.link.dispersion; });
    add_d("link.fiber_length", [](RunConfig& c) -> double& { return c.link.fiber_length; });
    add_i("link.n_up", [](RunConfig& c) -> int& { return c.link.n_up; });
    add_i("link.n_down", [](RunConfig& c) -> int& { return c.link.n_down; });
    add_d("link.rolloff", [](RunConfig& c) -> double& { return c.link.rolloff; });
    add_i("link.rrc_span", [](RunConfig& c) -> int& { return c.link.rrc_span; });
    add_d("link.bias", [](RunConfig& c) -> double& { return c.link.bias; });
    add_i("link.frame_symbols", [](RunConfig& c) -> int& { return c.link.frame_symbols; });

    add_i("snn.n_tap", [](RunConfig& c) -> int& { return c.snn.n_tap; });
    add_i("snn.neurons_per_tap", [](RunConfig& c) -> int& { return c.snn.neurons_per_tap; });
    add_i("snn.hidden", [](RunConfig& c) -> int& { return c.snn.hidden; });
    add_i("snn.classes", [](RunConfig& c) -> int& { return c.snn.classes; });
    add_d("snn.tau_m", [](RunConfig& c) -> double& { return c.snn.tau_m; });
    add_d("snn.tau_s", [](RunConfig& c) -> double& { return c.snn.tau_s; });
    add_d("snn.theta", [](RunConfig& c) -> double& { return c.snn.theta; });
    add_d("snn.v_reset", [](RunConfig& c) -> double& { return c.snn.v_reset; });
    add_d("snn.v_leak", [](RunConfig& c) -> double& { return c.snn.v_leak; });
    add_d("snn.r_leak", [](RunConfig& c) -> double& { return c.snn.r_leak; });
    add_d("snn.dt", [](RunConfig& c) -> double& { return c.snn.dt; });
    add_d("snn.t_max", [](RunConfig& c) -> double& { return c.snn.t_max; });
    add_d("snn.enc_alpha", [](RunConfig& c) -> double& { return c.snn.enc_alpha; });
    add_d("snn.enc_offset", [](RunConfig& c) -> double& { return c.snn.enc_offset; });
    add_d("snn.enc_cutoff", [](RunConfig& c) -> double& { return c.snn.enc_cutoff; });
    add_d("snn.chi_min", [](RunConfig& c) -> double& { return c.snn.chi_min; });
    add_d("snn.chi_max", [](RunConfig& c) -> double& { return c.snn.chi_max; });
    add_d("snn.sg_beta", [](RunConfig& c) -> double& { return c.snn.sg_beta; });

    add_d("train.ann_lr", [](RunConfig& c) -> double& { return c.train.ann_lr; });
    add_i("train.ann_batch", [](RunConfig& c) -> int& { return c.train.ann_batch; });
    add_d("train.ann_init_gain", [](RunConfig& c) -> double& { return c.train.ann_init_gain; });
    add_d("train.snn_lr", [](RunConfig& c) -> double& { return c.train.snn_lr; });
    add_i("train.snn_batch", [](RunConfig& c) -> int& { return c.train.snn_batch; });
    add_d("train.snn_init_gain", [](RunConfig& c) -> double& { return c.train.snn_init_gain; });

    f.push_back({"sweep.levels_db",
                 F{[](const RunConfig& c) {
                     std::string out;
                     for (size_t i = 0; i < c.sweep.levels_db.size(); ++i) {
                       if (i) out += ",";
                       out += fmt_g(c.sweep.levels_db[i]);
                     }
                     return out;
                   },
                   [](RunConfig& c, const std::string& v) {
                     c.sweep.levels_db.clear();
                     for (const std::string& tok : split(v, ','))
                       c.sweep.levels_db.push_back(parse_double(tok));
                   }}});
    add_i("sweep.seeds", [](RunConfig& c) -> int& { return c.sweep.seeds; });
    add_i("sweep.epochs_per_level", [](RunConfig& c) -> int& { return c.sweep.epochs_per_level; });
    add_i("sweep.patience", [](RunConfig& c) -> int& { return c.sweep.patience; });
    add_i("sweep.val_symbols", [](RunConfig& c) -> int& { return c.sweep.val_symbols; });
    add_i("sweep.min_errors", [](RunConfig& c) -> long& { return c.sweep.min_errors; });
    add_i("sweep.max_bits", [](RunConfig& c) -> long& { return c.sweep.max_bits; });
    add_d("sweep.confidence", [](RunConfig& c) -> double& { return c.sweep.confidence; });
    add_d("sweep.target_ber", [](RunConfig& c) -> double& { return c.sweep.target_ber; });

    f.push_back({"demappers",
                 F{[](const RunConfig& c) {
                     std::string out;
                     for (size_t i = 0; i < c.demappers.size(); ++i) {
                       if (i) out += ",";
                       out += c.demappers[i];
                     }
                     return out;
                   },
                   [](RunConfig& c, const std::string& v) {
                     c.demappers.clear();
                     for (const std::string& tok : split(v, ','))
                       if (!tok.empty()) c.demappers.push_back(tok);
                   }}});
    f.push_back({"root_seed",
                 F{[](const RunConfig& c) { return std::to_string(c.root_seed); },
                   [](RunConfig& c, const std::string& v) {
                     c.root_seed = std::stoull(v);
                   }}});
    return f;
  }();
  return fields;
}

}  // namespace detail

// Apply a single "key = value" assignment; unknown keys are an error.
inline void config_set(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& [k, field] : detail::config_fields()) {
    if (k == key) {
      try {
        field.set(cfg, value);
      } catch (const std::exception& e) {
        throw std::invalid_argument("config key '" + key + "': " + e.what());
      }
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

inline void write_config(std::ostream& os, const RunConfig& cfg) {
  for (const auto& [key, field] : detail::config_fields())
    os << key << " = " << field.get(cfg) << "\n";
}

inline void parse_config(std::istream& is, RunConfig& cfg) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    config_set(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  RunConfig cfg;
  parse_config(is, cfg);
  return cfg;
}

inline void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write config file " + path);
  write_config(os, cfg);
}

// ---------------------------------------------------------------------------
// Result tables

inline void write_records_csv(std::ostream& os, const std::vector<BerRecord>& records) {
  os << "demapper,noise_db,errors,bits,ber,ci_low,ci_high,seed,censored\n";
  for (const BerRecord& r : records)
    os << r.demapper << ',' << fmt_g(r.noise_db) << ',' << r.errors << ',' << r.bits
       << ',' << fmt_g(r.ber) << ',' << fmt_g(r.ci_low) << ',' << fmt_g(r.ci_high)
       << ',' << r.seed << ',' << (r.censored ? 1 : 0) << "\n";
}

inline std::vector<BerRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("records csv: empty file");
  if (trim(line) != "demapper,noise_db,errors,bits,ber,ci_low,ci_high,seed,censored")
    throw std::runtime_error("records csv: unexpected header");
  std::vector<BerRecord> out;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const std::vector<std::string> c = split(line, ',');
    if (c.size() != 9) throw std::runtime_error("records csv: bad row '" + line + "'");
    BerRecord r;
    r.demapper = c[0];
    r.noise_db = parse_double(c[1]);
    r.errors = parse_long(c[2]);
    r.bits = parse_long(c[3]);
    r.ber = parse_double(c[4]);
    r.ci_low = parse_double(c[5]);
    r.ci_high = parse_double(c[6]);
    r.seed = static_cast<int>(parse_long(c[7]));
    r.censored = parse_long(c[8]) != 0;
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_train_log_csv(std::ostream& os, const std::vector<TrainLogRow>& rows) {
  os << "demapper,seed,noise_db,epoch,loss,val_ber\n";
  for (const TrainLogRow& r : rows)
    os << r.demapper << ',' << r.seed << ',' << fmt_g(r.noise_db) << ',' << r.epoch
       << ',' << fmt_g(r.loss) << ',' << fmt_g(r.val_ber) << "\n";
}

// ---------------------------------------------------------------------------
// Labelled transmissions as CSV: two mapped bits, the sent amplitude and the
// received sample per symbol, with the generating settings up front.

inline void write_dataset_csv(std::ostream& os, const SymbolFrame& frame,
                              const RxSamples& rx, const LinkParams& link,
                              double noise_db) {
  if (frame.index.size() != rx.size())
    throw std::invalid_argument("write_dataset_csv: frame/rx size mismatch");
  os << "# imdd-dataset v1\n";
  os << "# baud_rate=" << fmt_g(link.baud_rate) << " wavelength=" << fmt_g(link.wavelength)
     << " dispersion=" << fmt_g(link.dispersion) << " fiber_length=" << fmt_g(link.fiber_length)
     << "\n";
  os << "# n_up=" << link.n_up << " n_down=" << link.n_down << " rolloff=" << fmt_g(link.rolloff)
     << " rrc_span=" << link.rrc_span << " bias=" << fmt_g(link.bias)
     << " noise_db=" << fmt_g(noise_db) << "\n";
  os << "bit1,bit2,level,sample\n";
  for (Index i = 0; i < rx.size(); ++i) {
    const int idx = frame.index[i];
    os << kGrayBits[idx][0] << ',' << kGrayBits[idx][1] << ','
       << fmt_g(symbol_value(idx)) << ',' << fmt_g(rx[i]) << "\n";
  }
}

struct DatasetCsv {
  VecXi index;     // symbol class per position
  RxSamples rx;    // received samples, frame aligned
  double noise_db = 0.0;
};

inline DatasetCsv read_dataset_csv(std::istream& is) {
  std::string line;
  DatasetCsv out;
  std::vector<int> idx;
  std::vector<double> rx;
  bool saw_header = false;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("noise_db=");
      if (pos != std::string::npos)
        out.noise_db = parse_double(trim(line.substr(pos + 9)));
      continue;
    }
    if (!saw_header) {
      if (line != "bit1,bit2,level,sample")
        throw std::runtime_error("dataset csv: unexpected column header");
      saw_header = true;
      continue;
    }
    const std::vector<std::string> c = split(line, ',');
    if (c.size() != 4) throw std::runtime_error("dataset csv: bad row '" + line + "'");
    const int b1 = static_cast<int>(parse_long(c[0]));
    const int b2 = static_cast<int>(parse_long(c[1]));
    idx.push_back(bits_to_index(b1, b2));
    rx.push_back(parse_double(c[3]));
  }
  if (!saw_header) throw std::runtime_error("dataset csv: missing column header");
  out.index = Eigen::Map<VecXi>(idx.data(), static_cast<Index>(idx.size()));
  out.rx = Eigen::Map<VecXd>(rx.data(), static_cast<Index>(rx.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Model files: scalar header lines, then named matrices in hex floats.

namespace detail {

inline void write_mat(std::ostream& os, const std::string& name, const MatXd& m) {
  os << "mat " << name << ' ' << m.rows() << ' ' << m.cols() << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) os << (c ? " " : "") << fmt_hex(m(r, c));
    os << "\n";
  }
}

struct ModelReader {
  std::istream& is;
  std::map<std::string, std::string> scalars;
  std::map<std::string, MatXd> mats;

  explicit ModelReader(std::istream& s) : is(s) {
    std::string line;
    while (std::getline(is, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string head;
      ss >> head;
      if (head == "mat") {
        std::string name;
        Index rows, cols;
        if (!(ss >> name >> rows >> cols))
          throw std::runtime_error("model file: bad matrix header '" + line + "'");
        MatXd m(rows, cols);
        for (Index r = 0; r < rows; ++r) {
          if (!std::getline(is, line))
            throw std::runtime_error("model file: truncated matrix " + name);
          std::stringstream row(line);
          std::string tok;
          for (Index c = 0; c < cols; ++c) {
            if (!(row >> tok))
              throw std::runtime_error("model file: short row in matrix " + name);
            m(r, c) = std::strtod(tok.c_str(), nullptr);
          }
        }
        mats[name] = std::move(m);
      } else {
        std::string rest;
        std::getline(ss, rest);
        scalars[head] = trim(rest);
      }
    }
  }

  const std::string& scalar(const std::string& key) const {
    const auto it = scalars.find(key);
    if (it == scalars.end())
      throw std::runtime_error("model file: missing field '" + key + "'");
    return it->second;
  }

  const MatXd& mat(const std::string& name) const {
    const auto it = mats.find(name);
    if (it == mats.end())
      throw std::runtime_error("model file: missing matrix '" + name + "'");
    return it->second;
  }
};

}  // namespace detail

inline void save_model(std::ostream& os, const AnyModel& model) {
  os << "imdd-model v1\n";
  std::visit(
      [&os](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ClassicalDemapper>) {
          os << "kind classical\n";
          os << "n_tap " << m.n_tap << "\n";
          os << "order " << m.order << "\n";
          os << "rank_deficient " << (m.rank_deficient ? 1 : 0) << "\n";
          os << "thresholds " << fmt_hex(m.slicer.t[0]) << ' ' << fmt_hex(m.slicer.t[1])
             << ' ' << fmt_hex(m.slicer.t[2]) << "\n";
          detail::write_mat(os, "coeffs", m.coeffs);
        } else if constexpr (std::is_same_v<M, AnnModel<double>>) {
          os << "kind ann\n";
          os << "n_tap " << m.n_tap << "\n";
          os << "classes " << m.classes << "\n";
          os << "hidden";
          for (int h : m.hidden) os << ' ' << h;
          os << "\n";
          detail::write_mat(os, "in_mean", m.in_mean);
          detail::write_mat(os, "in_scale", m.in_scale);
          for (size_t l = 0; l < m.layers.size(); ++l) {
            detail::write_mat(os, "W" + std::to_string(l), m.layers[l].W.value);
            detail::write_mat(os, "b" + std::to_string(l), m.layers[l].b.value);
          }
        } else {
          os << "kind snn\n";
          const SnnParams& p = m.p;
          os << "n_tap " << p.n_tap << "\n";
          os << "neurons_per_tap " << p.neurons_per_tap << "\n";
          os << "hidden " << p.hidden << "\n";
          os << "classes " << p.classes << "\n";
          os << "tau_m " << fmt_hex(p.tau_m) << "\n";
          os << "tau_s " << fmt_hex(p.tau_s) << "\n";
          os << "theta " << fmt_hex(p.theta) << "\n";
          os << "v_reset " << fmt_hex(p.v_reset) << "\n";
          os << "v_leak " << fmt_hex(p.v_leak) << "\n";
          os << "r_leak " << fmt_hex(p.r_leak) << "\n";
          os << "dt " << fmt_hex(p.dt) << "\n";
          os << "t_max " << fmt_hex(p.t_max) << "\n";
          os << "enc_alpha " << fmt_hex(p.enc_alpha) << "\n";
          os << "enc_offset " << fmt_hex(p.enc_offset) << "\n";
          os << "enc_cutoff " << fmt_hex(p.enc_cutoff) << "\n";
          os << "chi_min " << fmt_hex(p.chi_min) << "\n";
          os << "chi_max " << fmt_hex(p.chi_max) << "\n";
          os << "sg_beta " << fmt_hex(p.sg_beta) << "\n";
          detail::write_mat(os, "w_ih", m.w_ih.value);
          detail::write_mat(os, "w_ho", m.w_ho.value);
        }
      },
      model);
}

inline AnyModel load_model(std::istream& is) {
  std::string magic;
  if (!std::getline(is, magic) || trim(magic) != "imdd-model v1")
    throw std::runtime_error("model file: bad magic line");
  detail::ModelReader r(is);
  const std::string kind = r.scalar("kind");
  if (kind == "classical") {
    ClassicalDemapper m;
    m.n_tap = static_cast<int>(parse_long(r.scalar("n_tap")));
    m.order = static_cast<int>(parse_long(r.scalar("order")));
    m.rank_deficient = parse_long(r.scalar("rank_deficient")) != 0;
    std::stringstream ts(r.scalar("thresholds"));
    std::string tok;
    for (int i = 0; i < 3; ++i) {
      if (!(ts >> tok)) throw std::runtime_error("model file: bad thresholds");
      m.slicer.t[i] = std::strtod(tok.c_str(), nullptr);
    }
    m.coeffs = r.mat("coeffs").col(0);
    return m;
  }
  if (kind == "ann") {
    AnnModel<double> m;
    m.n_tap = static_cast<int>(parse_long(r.scalar("n_tap")));
    m.classes = static_cast<int>(parse_long(r.scalar("classes")));
    m.hidden.clear();
    std::stringstream hs(r.scalar("hidden"));
    int h;
    while (hs >> h) m.hidden.push_back(h);
    m.in_mean = r.mat("in_mean").col(0);
    m.in_scale = r.mat("in_scale").col(0);
    for (size_t l = 0; l <= m.hidden.size(); ++l) {
      AnnModel<double>::Dense d;
      d.W.value = r.mat("W" + std::to_string(l));
      d.W.grad = MatXd::Zero(d.W.value.rows(), d.W.value.cols());
      d.b.value = r.mat("b" + std::to_string(l));
      d.b.grad = MatXd::Zero(d.b.value.rows(), d.b.value.cols());
      m.layers.push_back(std::move(d));
    }
    return m;
  }
  if (kind == "snn") {
    SnnModel<double> m;
    SnnParams& p = m.p;
    p.n_tap = static_cast<int>(parse_long(r.scalar("n_tap")));
    p.neurons_per_tap = static_cast<int>(parse_long(r.scalar("neurons_per_tap")));
    p.hidden = static_cast<int>(parse_long(r.scalar("hidden")));
    p.classes = static_cast<int>(parse_long(r.scalar("classes")));
    p.tau_m = parse_hex(r.scalar("tau_m"));
    p.tau_s = parse_hex(r.scalar("tau_s"));
    p.theta = parse_hex(r.scalar("theta"));
    p.v_reset = parse_hex(r.scalar("v_reset"));
    p.v_leak = parse_hex(r.scalar("v_leak"));
    p.r_leak = parse_hex(r.scalar("r_leak"));
    p.dt = parse_hex(r.scalar("dt"));
    p.t_max = parse_hex(r.scalar("t_max"));
    p.enc_alpha = parse_hex(r.scalar("enc_alpha"));
    p.enc_offset = parse_hex(r.scalar("enc_offset"));
    p.enc_cutoff = parse_hex(r.scalar("enc_cutoff"));
    p.chi_min = parse_hex(r.scalar("chi_min"));
    p.chi_max = parse_hex(r.scalar("chi_max"));
    p.sg_beta = parse_hex(r.scalar("sg_beta"));
    m.w_ih.value = r.mat("w_ih");
    m.w_ih.grad = MatXd::Zero(p.hidden, p.inputs());
    m.w_ho.value = r.mat("w_ho");
    m.w_ho.grad = MatXd::Zero(p.classes, p.hidden);
    return m;
  }
  throw std::runtime_error("model file: unknown kind '" + kind + "'");
}

inline void save_model_file(const std::string& path, const AnyModel& model) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write model file " + path);
  save_model(os, model);
}

inline AnyModel load_model_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open model file " + path);
  return load_model(is);
}

}  // namespace imdd
