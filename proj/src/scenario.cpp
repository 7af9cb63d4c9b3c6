#include "agingmimo/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace agingmimo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioError(path + ": " + what);
}

/// Every object must be fully consumed: reject keys outside the allowed set.
void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) {
                ok = true;
                break;
            }
        if (!ok) fail(path + "." + it.key(), "unknown key");
    }
}

const json& require(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing required key '") + key + "'");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected a boolean");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

double get_number(const json& j, const std::string& path, const char* key, double dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : as_number(*it, path + "." + key);
}

int get_int(const json& j, const std::string& path, const char* key, int dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : as_int(*it, path + "." + key);
}

bool get_bool(const json& j, const std::string& path, const char* key, bool dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : as_bool(*it, path + "." + key);
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<int> as_int_list(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_int(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

SpectrumConfig parse_spectrum(const json& j, const std::string& path) {
    check_keys(j, path, {"kind", "center_rad", "concentration"});
    SpectrumConfig s;
    const std::string kind = as_string(require(j, path, "kind"), path + ".kind");
    if (kind == "uniform") {
        s.kind = SpectrumKind::uniform;
        if (j.contains("center_rad") || j.contains("concentration"))
            fail(path, "uniform spectrum takes no parameters");
    } else if (kind == "von_mises") {
        s.kind = SpectrumKind::von_mises;
        s.center_rad = as_number(require(j, path, "center_rad"), path + ".center_rad");
        s.concentration =
            as_number(require(j, path, "concentration"), path + ".concentration");
        if (s.concentration < 0) fail(path + ".concentration", "must be >= 0");
    } else {
        fail(path + ".kind", "expected 'uniform' or 'von_mises'");
    }
    return s;
}

RayChannelConfig parse_ray(const json& j, const std::string& path) {
    check_keys(j, path,
               {"model", "speed_mps", "carrier_hz", "symbol_rate_hz", "scatterers",
                "persistence", "aod", "aoa", "normalize", "tx_spacing_wavelengths",
                "rx_spacing_wavelengths", "tx_orientation_rad", "rx_orientation_rad"});
    RayChannelConfig c;
    c.speed_mps = get_number(j, path, "speed_mps", 0.0);
    if (c.speed_mps < 0) fail(path + ".speed_mps", "must be >= 0");
    c.carrier_hz = get_number(j, path, "carrier_hz", c.carrier_hz);
    if (c.carrier_hz <= 0) fail(path + ".carrier_hz", "must be > 0");
    c.symbol_rate_hz = get_number(j, path, "symbol_rate_hz", 1.0);
    if (c.symbol_rate_hz <= 0) fail(path + ".symbol_rate_hz", "must be > 0");
    c.scatterers = get_int(j, path, "scatterers", 1);
    if (c.scatterers < 1) fail(path + ".scatterers", "must be >= 1");
    if (j.contains("persistence")) {
        const std::string p = as_string(j["persistence"], path + ".persistence");
        if (p == "persistent")
            c.persistence = AnglePersistence::persistent;
        else if (p == "per_slot")
            c.persistence = AnglePersistence::per_slot;
        else
            fail(path + ".persistence", "expected 'persistent' or 'per_slot'");
    }
    if (j.contains("aod")) c.aod = parse_spectrum(j["aod"], path + ".aod");
    if (j.contains("aoa")) c.aoa = parse_spectrum(j["aoa"], path + ".aoa");
    c.normalize = get_bool(j, path, "normalize", true);
    c.tx_spacing_wavelengths = get_number(j, path, "tx_spacing_wavelengths", 0.5);
    c.rx_spacing_wavelengths = get_number(j, path, "rx_spacing_wavelengths", 0.5);
    if (c.tx_spacing_wavelengths <= 0 || c.rx_spacing_wavelengths <= 0)
        fail(path, "array spacings must be > 0");
    c.tx_orientation_rad = get_number(j, path, "tx_orientation_rad", 0.0);
    c.rx_orientation_rad = get_number(j, path, "rx_orientation_rad", 0.0);
    return c;
}

GaussianChannelConfig parse_gaussian(const json& j, const std::string& path) {
    check_keys(j, path,
               {"model", "spatial", "temporal", "tx_spacing_wavelengths",
                "rx_spacing_wavelengths", "tx_orientation_rad", "rx_orientation_rad"});
    GaussianChannelConfig c;
    if (j.contains("spatial")) {
        const json& s = j["spatial"];
        const std::string sp = path + ".spatial";
        check_keys(s, sp, {"kind", "tx_rho", "rx_rho", "tx_angles_rad", "rx_angles_rad"});
        const std::string kind = as_string(require(s, sp, "kind"), sp + ".kind");
        if (kind == "iid") {
            c.spatial = SpatialKind::iid;
        } else if (kind == "ones_mix") {
            c.spatial = SpatialKind::ones_mix;
            c.tx_rho = get_number(s, sp, "tx_rho", 0.0);
            c.rx_rho = get_number(s, sp, "rx_rho", 0.0);
            if (c.tx_rho < 0 || c.tx_rho > 1 || c.rx_rho < 0 || c.rx_rho > 1)
                fail(sp, "ones_mix correlations must lie in [0, 1]");
        } else if (kind == "steering") {
            c.spatial = SpatialKind::steering;
            c.tx_angles_rad =
                as_number_list(require(s, sp, "tx_angles_rad"), sp + ".tx_angles_rad");
            c.rx_angles_rad =
                as_number_list(require(s, sp, "rx_angles_rad"), sp + ".rx_angles_rad");
            if (c.tx_angles_rad.empty() || c.rx_angles_rad.empty())
                fail(sp, "steering needs at least one angle per side");
        } else {
            fail(sp + ".kind", "expected 'iid', 'ones_mix' or 'steering'");
        }
    }
    if (j.contains("temporal")) {
        const json& t = j["temporal"];
        const std::string tp = path + ".temporal";
        check_keys(t, tp, {"kind", "doppler_hz", "symbol_rate_hz"});
        const std::string kind = as_string(require(t, tp, "kind"), tp + ".kind");
        if (kind == "constant") {
            c.temporal = TemporalKind::constant;
        } else if (kind == "jakes") {
            c.temporal = TemporalKind::jakes;
            c.doppler_hz = as_number(require(t, tp, "doppler_hz"), tp + ".doppler_hz");
            c.symbol_rate_hz =
                as_number(require(t, tp, "symbol_rate_hz"), tp + ".symbol_rate_hz");
            if (c.doppler_hz < 0) fail(tp + ".doppler_hz", "must be >= 0");
            if (c.symbol_rate_hz <= 0) fail(tp + ".symbol_rate_hz", "must be > 0");
        } else {
            fail(tp + ".kind", "expected 'constant' or 'jakes'");
        }
    }
    c.tx_spacing_wavelengths = get_number(j, path, "tx_spacing_wavelengths", 0.5);
    c.rx_spacing_wavelengths = get_number(j, path, "rx_spacing_wavelengths", 0.5);
    c.tx_orientation_rad = get_number(j, path, "tx_orientation_rad", 0.0);
    c.rx_orientation_rad = get_number(j, path, "rx_orientation_rad", 0.0);
    return c;
}

UserConfig parse_user(const json& j, const std::string& path) {
    check_keys(j, path, {"gain_db", "channel"});
    UserConfig u;
    u.gain_db = get_number(j, path, "gain_db", 0.0);
    const json& ch = require(j, path, "channel");
    const std::string cp = path + ".channel";
    if (!ch.is_object()) fail(cp, "expected an object");
    const std::string model = as_string(require(ch, cp, "model"), cp + ".model");
    if (model == "rays") {
        u.is_ray = true;
        u.ray = parse_ray(ch, cp);
    } else if (model == "gaussian") {
        u.is_ray = false;
        u.gaussian = parse_gaussian(ch, cp);
    } else {
        fail(cp + ".model", "expected 'rays' or 'gaussian'");
    }
    return u;
}

}  // namespace

AngularSpectrum SpectrumConfig::make() const {
    if (kind == SpectrumKind::von_mises)
        return AngularSpectrum::make_von_mises(center_rad, concentration);
    return AngularSpectrum::make_uniform();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path);
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    return parse_scenario_json(read_file(path), path);
}

ScenarioConfig parse_scenario_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": invalid JSON: " + e.what());
    }
    const std::string root = origin;
    check_keys(doc, root,
               {"name", "seed", "system", "frame", "powers", "beamformer",
                "variance_from_true_cov", "correlate", "evaluation", "optimizer"});

    ScenarioConfig cfg;
    cfg.name = as_string(require(doc, root, "name"), root + ".name");
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !s.is_number_integer())
            fail(root + ".seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }

    const json& sys = require(doc, root, "system");
    const std::string sp = root + ".system";
    check_keys(sys, sp,
               {"n_tx", "n_rx", "tau_p", "pilot_noise_var", "data_noise_var", "users"});
    cfg.n_tx = as_int(require(sys, sp, "n_tx"), sp + ".n_tx");
    cfg.n_rx = as_int(require(sys, sp, "n_rx"), sp + ".n_rx");
    if (cfg.n_tx < 1 || cfg.n_rx < 1) fail(sp, "array sizes must be >= 1");
    cfg.tau_p = as_int(require(sys, sp, "tau_p"), sp + ".tau_p");
    if (cfg.tau_p < 1) fail(sp + ".tau_p", "must be >= 1");
    cfg.pilot_noise_var = get_number(sys, sp, "pilot_noise_var", 1.0);
    cfg.data_noise_var = get_number(sys, sp, "data_noise_var", 1.0);
    if (cfg.pilot_noise_var <= 0 || cfg.data_noise_var <= 0)
        fail(sp, "noise variances must be > 0");
    const json& users = require(sys, sp, "users");
    if (!users.is_array() || users.empty()) fail(sp + ".users", "expected a non-empty array");
    for (std::size_t k = 0; k < users.size(); ++k)
        cfg.users.push_back(
            parse_user(users[k], sp + ".users[" + std::to_string(k) + "]"));

    if (doc.contains("frame")) {
        const json& fr = doc["frame"];
        const std::string fp = root + ".frame";
        check_keys(fr, fp, {"block_sizes"});
        cfg.frame_blocks = as_int_list(require(fr, fp, "block_sizes"), fp + ".block_sizes");
        if (cfg.frame_blocks.empty()) fail(fp + ".block_sizes", "must be non-empty");
        for (int q : cfg.frame_blocks)
            if (q < 2) fail(fp + ".block_sizes", "every block needs >= 2 slots");
        cfg.has_frame = true;
    }

    if (doc.contains("powers")) {
        const json& pw = doc["powers"];
        const std::string pp = root + ".powers";
        check_keys(pw, pp, {"pilot_budget", "data_budget"});
        cfg.pilot_budget = as_number(require(pw, pp, "pilot_budget"), pp + ".pilot_budget");
        cfg.data_budget = as_number(require(pw, pp, "data_budget"), pp + ".data_budget");
        if (cfg.pilot_budget <= 0 || cfg.data_budget <= 0)
            fail(pp, "power budgets must be > 0");
        cfg.has_powers = true;
    }

    if (doc.contains("beamformer")) {
        cfg.beamformer_mode = as_string(doc["beamformer"], root + ".beamformer");
        if (cfg.beamformer_mode != "optimal" && cfg.beamformer_mode != "isotropic")
            fail(root + ".beamformer", "expected 'optimal' or 'isotropic'");
    }
    cfg.variance_from_true_cov = get_bool(doc, root, "variance_from_true_cov", false);

    if (doc.contains("correlate")) {
        const json& co = doc["correlate"];
        const std::string cp = root + ".correlate";
        check_keys(co, cp, {"user", "reference_t", "t_start", "t_end", "numeric"});
        cfg.correlate.user = get_int(co, cp, "user", 0);
        cfg.correlate.reference_t = get_int(co, cp, "reference_t", 1);
        cfg.correlate.t_start = get_int(co, cp, "t_start", 1);
        cfg.correlate.t_end = get_int(co, cp, "t_end", cfg.correlate.t_start);
        cfg.correlate.numeric = get_bool(co, cp, "numeric", false);
        if (cfg.correlate.user < 0 ||
            cfg.correlate.user >= static_cast<int>(cfg.users.size()))
            fail(cp + ".user", "user index out of range");
        if (cfg.correlate.t_end < cfg.correlate.t_start)
            fail(cp, "t_end must be >= t_start");
        cfg.has_correlate = true;
    }

    if (doc.contains("evaluation")) {
        const json& ev = doc["evaluation"];
        const std::string ep = root + ".evaluation";
        check_keys(ev, ep, {"trials", "n_rx_sweep", "slot"});
        cfg.evaluation.trials = get_int(ev, ep, "trials", 1000);
        if (cfg.evaluation.trials < 1) fail(ep + ".trials", "must be >= 1");
        if (ev.contains("n_rx_sweep")) {
            cfg.evaluation.n_rx_sweep =
                as_int_list(ev["n_rx_sweep"], ep + ".n_rx_sweep");
            for (int n : cfg.evaluation.n_rx_sweep)
                if (n < 1) fail(ep + ".n_rx_sweep", "entries must be >= 1");
        }
        cfg.evaluation.slot = get_int(ev, ep, "slot", -1);
    }

    if (doc.contains("optimizer")) {
        const json& op = doc["optimizer"];
        const std::string opp = root + ".optimizer";
        check_keys(op, opp, {"q_max", "m_max", "total_power", "ao_rounds"});
        cfg.optimizer.q_max = get_int(op, opp, "q_max", 4);
        cfg.optimizer.m_max = get_int(op, opp, "m_max", 2);
        cfg.optimizer.total_power = get_number(op, opp, "total_power", 1.0);
        cfg.optimizer.ao_rounds = get_int(op, opp, "ao_rounds", 2);
        if (cfg.optimizer.q_max < 2) fail(opp + ".q_max", "must be >= 2");
        if (cfg.optimizer.m_max < 1) fail(opp + ".m_max", "must be >= 1");
        if (cfg.optimizer.total_power <= 0) fail(opp + ".total_power", "must be > 0");
        if (cfg.optimizer.ao_rounds < 1) fail(opp + ".ao_rounds", "must be >= 1");
        cfg.has_optimizer = true;
    }

    return cfg;
}

}  // namespace agingmimo
