#include "acqroc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace acqroc::harness {

using nlohmann::json;

std::vector<double> BetaGridSpec::betas() const
{
    if (!explicit_betas.empty())
        return explicit_betas;
    std::vector<double> out(static_cast<std::size_t>(points));
    const double hi = std::log(max_pfa);
    const double lo = std::log(min_pfa);
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        out[static_cast<std::size_t>(i)] = -(hi + (lo - hi) * frac);
    }
    return out;
}

int ExperimentConfig::accept_half_width(double width_hz) const
{
    const auto it = m_by_width.find(width_hz);
    return it == m_by_width.end() ? m : it->second;
}

analytic::DopplerGrid ExperimentConfig::grid(double width_hz) const
{
    return analytic::DopplerGrid(width_hz, f_dmax_hz, params.t_per);
}

sim::SimConfig ExperimentConfig::sim_config(double width_hz) const
{
    sim::SimConfig c;
    c.trials = trials;
    c.seed = seed;
    c.fidelity = fidelity;
    c.params = params;
    c.grid = grid(width_hz);
    c.policy = {order, accept_half_width(width_hz), 0.0};
    c.l_max = l_max;
    return c;
}

void ExperimentConfig::validate() const
{
    const auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (!std::isfinite(params.cn0_dbhz))
        fail("cn0_dbhz must be finite");
    if (!(params.t_per > 0.0) || !std::isfinite(params.t_per))
        fail("tper_ms must be positive");
    if (!(f_dmax_hz > 0.0) || !std::isfinite(f_dmax_hz))
        fail("fdmax_hz must be positive");
    if (bin_widths_hz.empty())
        fail("bin_widths_hz must not be empty");
    for (double w : bin_widths_hz)
        if (!(w > 0.0) || !std::isfinite(w))
            fail("bin_widths_hz entries must be positive");
    if (m < 0)
        fail("m must be non-negative");
    for (const auto& [width, mw] : m_by_width) {
        if (std::find(bin_widths_hz.begin(), bin_widths_hz.end(), width) == bin_widths_hz.end())
            fail("m_by_width key " + std::to_string(width) + " is not one of bin_widths_hz");
        if (mw < 0)
            fail("m_by_width values must be non-negative");
    }
    for (double w : bin_widths_hz) {
        const int k = grid(w).num_bins();
        const int mw = accept_half_width(w);
        if (mw >= k)
            fail("M = " + std::to_string(mw) + " must be smaller than K = " + std::to_string(k) +
                 " for bin width " + std::to_string(w) + " Hz");
    }
    if (beta_grid.explicit_betas.empty()) {
        if (beta_grid.points < 1)
            fail("beta_grid.points must be at least 1");
        if (!(beta_grid.min_pfa > 0.0 && beta_grid.min_pfa <= beta_grid.max_pfa &&
              beta_grid.max_pfa <= 1.0))
            fail("beta_grid requires 0 < min_pfa <= max_pfa <= 1");
        if (beta_grid.points > 1 && beta_grid.min_pfa == beta_grid.max_pfa)
            fail("beta_grid with several points needs min_pfa < max_pfa");
    } else {
        const auto& b = beta_grid.explicit_betas;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (!(b[i] >= 0.0) || !std::isfinite(b[i]))
                fail("beta_grid thresholds must be finite and non-negative");
            if (i > 0 && !(b[i] > b[i - 1]))
                fail("beta_grid thresholds must be strictly increasing");
        }
    }
    if (trials < 1)
        fail("trials must be at least 1");
    if (l_max < 0 || l_max > 50)
        fail("lmax must lie in [0, 50]");
}

sim::Fidelity parse_fidelity(const std::string& text)
{
    if (text == "metric")
        return sim::Fidelity::MetricLevel;
    if (text == "waveform")
        return sim::Fidelity::Waveform;
    throw ConfigError("fidelity must be \"metric\" or \"waveform\", got \"" + text + "\"");
}

analytic::SearchOrder parse_order(const std::string& text)
{
    if (text == "code-first")
        return analytic::SearchOrder::CodePhaseFirst;
    if (text == "doppler-first")
        return analytic::SearchOrder::DopplerFirst;
    throw ConfigError("order must be \"code-first\" or \"doppler-first\", got \"" + text + "\"");
}

namespace {

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double number(const json& j, const std::string& field)
{
    if (!j.is_number())
        throw ConfigError("field '" + field + "' must be a number");
    return j.get<double>();
}

long integer(const json& j, const std::string& field)
{
    if (j.is_number_integer())
        return j.get<long>();
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::floor(v) == v && std::abs(v) < 9e15)
            return static_cast<long>(v);
    }
    throw ConfigError("field '" + field + "' must be an integer");
}

std::string string(const json& j, const std::string& field)
{
    if (!j.is_string())
        throw ConfigError("field '" + field + "' must be a string");
    return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
    for (const auto& item : obj.items())
        if (!known.contains(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": parse error at " + line_col(text, e.byte > 0 ? e.byte - 1 : 0) +
                          ": " + e.what());
    }
    if (!doc.is_object())
        throw ConfigError(source + ": top level must be a JSON object");

    try {
        reject_unknown(doc,
                       {"cn0_dbhz", "tper_ms", "fdmax_hz", "bin_widths_hz", "m", "m_by_width",
                        "beta_grid", "trials", "seed", "fidelity", "order", "lmax"},
                       "top level");

        ExperimentConfig cfg;
        if (!doc.contains("cn0_dbhz"))
            throw ConfigError("missing required field 'cn0_dbhz'");
        if (!doc.contains("tper_ms"))
            throw ConfigError("missing required field 'tper_ms'");
        cfg.params.cn0_dbhz = number(doc["cn0_dbhz"], "cn0_dbhz");
        cfg.params.t_per = number(doc["tper_ms"], "tper_ms") * 1e-3;

        if (doc.contains("fdmax_hz"))
            cfg.f_dmax_hz = number(doc["fdmax_hz"], "fdmax_hz");
        if (doc.contains("bin_widths_hz")) {
            const json& w = doc["bin_widths_hz"];
            if (!w.is_array())
                throw ConfigError("field 'bin_widths_hz' must be an array");
            cfg.bin_widths_hz.clear();
            for (std::size_t i = 0; i < w.size(); ++i)
                cfg.bin_widths_hz.push_back(
                    number(w[i], "bin_widths_hz[" + std::to_string(i) + "]"));
        }
        if (doc.contains("m"))
            cfg.m = static_cast<int>(integer(doc["m"], "m"));
        if (doc.contains("m_by_width")) {
            const json& mw = doc["m_by_width"];
            if (!mw.is_object())
                throw ConfigError("field 'm_by_width' must be an object");
            for (const auto& item : mw.items()) {
                double width;
                try {
                    std::size_t used = 0;
                    width = std::stod(item.key(), &used);
                    if (used != item.key().size())
                        throw std::invalid_argument("trailing characters");
                } catch (const std::exception&) {
                    throw ConfigError("m_by_width key '" + item.key() + "' is not a bin width");
                }
                cfg.m_by_width[width] =
                    static_cast<int>(integer(item.value(), "m_by_width." + item.key()));
            }
        }
        if (doc.contains("beta_grid")) {
            const json& g = doc["beta_grid"];
            if (g.is_array()) {
                for (std::size_t i = 0; i < g.size(); ++i)
                    cfg.beta_grid.explicit_betas.push_back(
                        number(g[i], "beta_grid[" + std::to_string(i) + "]"));
                if (cfg.beta_grid.explicit_betas.empty())
                    throw ConfigError("field 'beta_grid' must not be empty");
            } else if (g.is_object()) {
                reject_unknown(g, {"min_pfa", "max_pfa", "points"}, "beta_grid");
                if (g.contains("min_pfa"))
                    cfg.beta_grid.min_pfa = number(g["min_pfa"], "beta_grid.min_pfa");
                if (g.contains("max_pfa"))
                    cfg.beta_grid.max_pfa = number(g["max_pfa"], "beta_grid.max_pfa");
                if (g.contains("points"))
                    cfg.beta_grid.points =
                        static_cast<int>(integer(g["points"], "beta_grid.points"));
            } else {
                throw ConfigError("field 'beta_grid' must be an object or an array");
            }
        }
        if (doc.contains("trials"))
            cfg.trials = integer(doc["trials"], "trials");
        if (doc.contains("seed")) {
            const long s = integer(doc["seed"], "seed");
            if (s < 0)
                throw ConfigError("field 'seed' must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(s);
        }
        if (doc.contains("fidelity"))
            cfg.fidelity = parse_fidelity(string(doc["fidelity"], "fidelity"));
        if (doc.contains("order"))
            cfg.order = parse_order(string(doc["order"], "order"));
        if (doc.contains("lmax"))
            cfg.l_max = static_cast<int>(integer(doc["lmax"], "lmax"));

        cfg.validate();
        return cfg;
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open configuration file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace acqroc::harness
