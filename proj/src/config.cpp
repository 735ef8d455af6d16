#include "frc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "frc/error.hpp"

namespace frc {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as a number");
    }
    if (pos != value.size())
        throw config_error("key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    if (!value.empty() && value[0] == '-')
        throw config_error("key '" + key + "': '" + value + "' must be nonnegative");
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + value + "' as an integer");
    }
    if (pos != value.size())
        throw config_error("key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw config_error("key '" + key + "': expected true/false, got '" + value + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

Setter dbl(double ExperimentConfig::* field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_double(k, v);
    };
}

Setter cls_dbl(double ClassParams::* field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.class_params.*field = parse_double(k, v);
    };
}

Setter u32(std::uint32_t ExperimentConfig::* field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        auto raw = parse_uint(k, v);
        if (raw > 0xFFFFFFFFULL) throw config_error("key '" + k + "': value too large");
        c.*field = static_cast<std::uint32_t>(raw);
    };
}

Setter u64(std::uint64_t ExperimentConfig::* field) {
    return [field](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_uint(k, v);
    };
}

Setter str(std::string ExperimentConfig::* field) {
    return [field](ExperimentConfig& c, const std::string&, const std::string& v) {
        c.*field = v;
    };
}

const std::map<std::string, Setter>& key_table() {
    static const std::map<std::string, Setter> table = {
        {"sample_rate", dbl(&ExperimentConfig::sample_rate)},
        {"duration_samples", u64(&ExperimentConfig::duration_samples)},
        {"snr_db", dbl(&ExperimentConfig::snr_db)},
        {"jsr_db_min", dbl(&ExperimentConfig::jsr_db_min)},
        {"jsr_db_max", dbl(&ExperimentConfig::jsr_db_max)},
        {"tone_offset_min", cls_dbl(&ClassParams::tone_offset_min)},
        {"tone_offset_max", cls_dbl(&ClassParams::tone_offset_max)},
        {"am_depth_min", cls_dbl(&ClassParams::am_depth_min)},
        {"am_depth_max", cls_dbl(&ClassParams::am_depth_max)},
        {"am_modf_min", cls_dbl(&ClassParams::am_modf_min)},
        {"am_modf_max", cls_dbl(&ClassParams::am_modf_max)},
        {"chirp_bw_min", cls_dbl(&ClassParams::chirp_bw_min)},
        {"chirp_bw_max", cls_dbl(&ClassParams::chirp_bw_max)},
        {"chirp_period_min", cls_dbl(&ClassParams::chirp_period_min)},
        {"chirp_period_max", cls_dbl(&ClassParams::chirp_period_max)},
        {"fm_dev_min", cls_dbl(&ClassParams::fm_dev_min)},
        {"fm_dev_max", cls_dbl(&ClassParams::fm_dev_max)},
        {"fm_modf_min", cls_dbl(&ClassParams::fm_modf_min)},
        {"fm_modf_max", cls_dbl(&ClassParams::fm_modf_max)},
        {"dme_rate_min", cls_dbl(&ClassParams::dme_rate_min)},
        {"dme_rate_max", cls_dbl(&ClassParams::dme_rate_max)},
        {"nb_bw_min", cls_dbl(&ClassParams::nb_bw_min)},
        {"nb_bw_max", cls_dbl(&ClassParams::nb_bw_max)},
        {"units", u32(&ExperimentConfig::units)},
        {"spectral_radius", dbl(&ExperimentConfig::spectral_radius)},
        {"leaking_rate", dbl(&ExperimentConfig::leaking_rate)},
        {"input_scaling", dbl(&ExperimentConfig::input_scaling)},
        {"input_connectivity", u32(&ExperimentConfig::input_connectivity)},
        {"recurrent_connectivity", u32(&ExperimentConfig::recurrent_connectivity)},
        {"washout", u32(&ExperimentConfig::washout)},
        {"per_class", u64(&ExperimentConfig::per_class)},
        {"beta", dbl(&ExperimentConfig::beta)},
        {"n_clients", u32(&ExperimentConfig::n_clients)},
        {"fraction", dbl(&ExperimentConfig::fraction)},
        {"rounds", u32(&ExperimentConfig::rounds)},
        {"scheme",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             if (v == "iid")
                 c.scheme = PartitionScheme::IID;
             else if (v == "dirichlet")
                 c.scheme = PartitionScheme::Dirichlet;
             else
                 throw config_error("key '" + k + "': expected iid or dirichlet, got '" + v + "'");
         }},
        {"alpha", dbl(&ExperimentConfig::alpha)},
        {"train_fraction", dbl(&ExperimentConfig::train_fraction)},
        {"seed", u64(&ExperimentConfig::seed)},
        {"client_side_regularization",
         [](ExperimentConfig& c, const std::string& k, const std::string& v) {
             c.client_side_regularization = parse_bool(k, v);
         }},
        {"data_dir", str(&ExperimentConfig::data_dir)},
        {"metrics_out", str(&ExperimentConfig::metrics_out)},
        {"model_out", str(&ExperimentConfig::model_out)},
    };
    return table;
}

}  // namespace

void ExperimentConfig::validate() const {
    to_signal_params().validate();
    to_reservoir_config().validate();
    if (!(beta > 0.0)) throw config_error("beta must be > 0");
    if (n_clients < 1) throw config_error("n_clients must be >= 1");
    if (!(fraction > 0.0) || fraction > 1.0) throw config_error("fraction must be in (0, 1]");
    if (rounds < 1) throw config_error("rounds must be >= 1");
    if (scheme == PartitionScheme::Dirichlet && !(alpha > 0.0))
        throw config_error("alpha must be > 0 for the dirichlet scheme");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw config_error("train_fraction must be in (0, 1)");
    if (data_dir.empty() && per_class < 1)
        throw config_error("per_class must be >= 1 when synthesizing data");
}

SignalParams ExperimentConfig::to_signal_params() const {
    SignalParams p;
    p.sample_rate = sample_rate;
    p.duration_samples = duration_samples;
    p.snr_db = snr_db;
    p.jsr_db_min = jsr_db_min;
    p.jsr_db_max = jsr_db_max;
    p.class_params = class_params;
    p.seed = seed;
    return p;
}

ReservoirConfig ExperimentConfig::to_reservoir_config() const {
    ReservoirConfig c;
    c.units = units;
    c.spectral_radius = spectral_radius;
    c.leaking_rate = leaking_rate;
    c.input_scaling = input_scaling;
    c.input_connectivity = input_connectivity;
    c.recurrent_connectivity = recurrent_connectivity;
    c.input_dim = 256;  // fixed by the spectrogram pipeline output
    c.washout = washout;
    c.seed = seed;
    return c;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(lineno) + ": missing key");
        auto it = key_table().find(key);
        if (it == key_table().end())
            throw config_error("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw config_error("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
        it->second(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace frc
