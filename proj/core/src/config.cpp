#include "vaxalloc/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "vaxalloc/errors.hpp"
#include "vaxalloc/format.hpp"

namespace vaxalloc::run {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& value, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto v = parse_double(trim(item));
        if (!v) throw ConfigError("bad numeric list element '" + item + "'", field);
        out.push_back(*v);
    }
    if (out.empty()) throw ConfigError("empty list", field);
    return out;
}

std::vector<std::string> parse_string_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Setter {
    RunConfig& cfg;

    void apply(const std::string& field, const std::string& value) {
        const auto as_double = [&] {
            const auto v = parse_double(value);
            if (!v) throw ConfigError("expected a number, got '" + value + "'", field);
            return *v;
        };
        const auto as_size = [&] {
            const double v = as_double();
            if (v < 0 || v != std::floor(v))
                throw ConfigError("expected a non-negative integer, got '" + value + "'", field);
            return static_cast<std::size_t>(v);
        };
        const auto as_u64 = [&] { return static_cast<std::uint64_t>(as_size()); };
        const auto as_bool = [&] {
            if (value == "true" || value == "1") return true;
            if (value == "false" || value == "0") return false;
            throw ConfigError("expected true/false, got '" + value + "'", field);
        };

        if (field == "data.vaccinations") cfg.data.vaccinations = value;
        else if (field == "data.population") cfg.data.population = value;
        else if (field == "data.statemeta") cfg.data.statemeta = value;
        else if (field == "predictor.epochs") cfg.predictor.epochs = as_size();
        else if (field == "predictor.lr") cfg.predictor.lr = as_double();
        else if (field == "predictor.seed") cfg.predictor.seed = as_u64();
        else if (field == "predictor.use_attention") cfg.predictor.use_attention = as_bool();
        else if (field == "predictor.warmup") cfg.predictor.warmup = as_size();
        else if (field == "predictor.fixed_len") cfg.predictor.fixed_len = as_size();
        else if (field == "predictor.batch") cfg.predictor.batch = as_size();
        else if (field == "predictor.hidden") cfg.predictor.hidden = as_size();
        else if (field == "predictor.ablation") cfg.predictor_ablation = as_bool();
        else if (field == "costs.seed") cfg.costs.seed = as_u64();
        else if (field == "costs.aggregate_mode")
            cfg.costs.aggregate_mode = cost::aggregate_mode_from(value);
        else if (field == "agent.gamma") cfg.agent.gamma = as_double();
        else if (field == "agent.lr") cfg.agent.lr = as_double();
        else if (field == "agent.episodes") cfg.agent.episodes = as_size();
        else if (field == "agent.iterations") cfg.agent.iterations = as_size();
        else if (field == "agent.minibatch") cfg.agent.minibatch = as_size();
        else if (field == "agent.eps_max") cfg.agent.eps_max = as_double();
        else if (field == "agent.eps_min") cfg.agent.eps_min = as_double();
        else if (field == "agent.eps_decay") cfg.agent.eps_decay = as_double();
        else if (field == "agent.target_sync") cfg.agent.target_sync = as_size();
        else if (field == "agent.replay_capacity") cfg.agent.replay_capacity = as_size();
        else if (field == "agent.warmup_factor") cfg.agent.warmup_factor = as_size();
        else if (field == "agent.seed") cfg.agent.seed = as_u64();
        else if (field == "agent.states")
            cfg.agent_states = value == "all" ? std::vector<std::string>{} : parse_string_list(value);
        else if (field == "sweep.lrs") cfg.sweep.lrs = parse_double_list(value, field);
        else if (field == "sweep.gammas") cfg.sweep.gammas = parse_double_list(value, field);
        else if (field == "output.dir") cfg.output_dir = value;
        else throw ConfigError("unknown configuration key", field);
    }
};

void validate(const RunConfig& cfg) {
    if (cfg.data.vaccinations.empty())
        throw ConfigError("required path not set", "data.vaccinations");
    if (cfg.data.population.empty()) throw ConfigError("required path not set", "data.population");
    if (cfg.data.statemeta.empty()) throw ConfigError("required path not set", "data.statemeta");
    for (const auto& p : {cfg.data.vaccinations, cfg.data.population, cfg.data.statemeta})
        if (!std::filesystem::exists(p)) throw MissingFileError(p);

    if (!(cfg.predictor.lr > 0.0)) throw ConfigError("must be positive", "predictor.lr");
    if (cfg.predictor.epochs == 0) throw ConfigError("must be positive", "predictor.epochs");
    if (cfg.predictor.batch == 0) throw ConfigError("must be positive", "predictor.batch");
    if (cfg.predictor.hidden == 0) throw ConfigError("must be positive", "predictor.hidden");
    if (cfg.predictor.fixed_len == 0) throw ConfigError("must be positive", "predictor.fixed_len");
    cfg.agent.validate();
    if (cfg.output_dir.empty()) throw ConfigError("must not be empty", "output.dir");
}

} // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig load_config(const std::string& path) {
    if (!std::filesystem::exists(path)) throw MissingFileError(path);
    std::ifstream in(path);
    if (!in) throw MissingFileError(path);

    RunConfig cfg;
    Setter setter{cfg};
    std::string line, section;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(line_no),
                                  line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(line_no), line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string field = section.empty() ? key : section + "." + key;
        setter.apply(field, value);
    }

    apply_env_overrides(cfg);
    validate(cfg);
    return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
    if (const char* out = std::getenv("VAXALLOC_OUT"); out && *out) cfg.output_dir = out;
    if (const char* seed = std::getenv("VAXALLOC_SEED"); seed && *seed) {
        const auto v = parse_double(seed);
        if (!v || *v < 0 || *v != std::floor(*v))
            throw ConfigError("VAXALLOC_SEED must be a non-negative integer", "env.VAXALLOC_SEED");
        const auto s = static_cast<std::uint64_t>(*v);
        cfg.predictor.seed = s;
        cfg.costs.seed = s;
        cfg.agent.seed = s;
    }
}

void print_config(std::ostream& out, const RunConfig& cfg) {
    const auto join = [](const auto& values, auto render) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) s += ",";
            s += render(values[i]);
        }
        return s;
    };
    const auto num = [](double v) { return fmt_double(v); };

    out << "[data]\n"
        << "vaccinations = " << cfg.data.vaccinations << "\n"
        << "population = " << cfg.data.population << "\n"
        << "statemeta = " << cfg.data.statemeta << "\n\n";
    out << "[predictor]\n"
        << "epochs = " << cfg.predictor.epochs << "\n"
        << "lr = " << fmt_double(cfg.predictor.lr) << "\n"
        << "seed = " << cfg.predictor.seed << "\n"
        << "use_attention = " << (cfg.predictor.use_attention ? "true" : "false") << "\n"
        << "warmup = " << cfg.predictor.warmup << "\n"
        << "fixed_len = " << cfg.predictor.fixed_len << "\n"
        << "batch = " << cfg.predictor.batch << "\n"
        << "hidden = " << cfg.predictor.hidden << "\n"
        << "ablation = " << (cfg.predictor_ablation ? "true" : "false") << "\n\n";
    out << "[costs]\n"
        << "seed = " << cfg.costs.seed << "\n"
        << "aggregate_mode = " << cost::to_string(cfg.costs.aggregate_mode) << "\n\n";
    out << "[agent]\n"
        << "gamma = " << fmt_double(cfg.agent.gamma) << "\n"
        << "lr = " << fmt_double(cfg.agent.lr) << "\n"
        << "episodes = " << cfg.agent.episodes << "\n"
        << "iterations = " << cfg.agent.iterations << "\n"
        << "minibatch = " << cfg.agent.minibatch << "\n"
        << "eps_max = " << fmt_double(cfg.agent.eps_max) << "\n"
        << "eps_min = " << fmt_double(cfg.agent.eps_min) << "\n"
        << "eps_decay = " << fmt_double(cfg.agent.eps_decay) << "\n"
        << "target_sync = " << cfg.agent.target_sync << "\n"
        << "replay_capacity = " << cfg.agent.replay_capacity << "\n"
        << "warmup_factor = " << cfg.agent.warmup_factor << "\n"
        << "seed = " << cfg.agent.seed << "\n"
        << "states = "
        << (cfg.agent_states.empty() ? "all" : join(cfg.agent_states, [](const std::string& s) {
               return s;
           }))
        << "\n\n";
    out << "[sweep]\n"
        << "lrs = " << join(cfg.sweep.lrs, num) << "\n"
        << "gammas = " << join(cfg.sweep.gammas, num) << "\n\n";
    out << "[output]\n"
        << "dir = " << cfg.output_dir << "\n";
}

} // namespace vaxalloc::run
