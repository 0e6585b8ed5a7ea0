// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/config.hpp"

#include <cctype>
#include <fstream>

namespace hallucimc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config key " + key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.contains(key);
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
    return sections.at(section).at(key);
}

ConfigFile parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    ConfigFile cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            cfg.sections[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = unquote(trim(line.substr(eq + 1)));
        if (key.empty())
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": empty key");
        cfg.sections[section][key] = value;
    }
    return cfg;
}

void apply_generation_config(const ConfigFile& cfg, GenerationParams& p) {
    const std::string s = "generation";
    if (cfg.has(s, "temperature")) p.temperature = std::stod(cfg.get(s, "temperature"));
    if (cfg.has(s, "top_p")) p.top_p = std::stod(cfg.get(s, "top_p"));
    if (cfg.has(s, "max_tokens")) p.max_tokens = std::stoi(cfg.get(s, "max_tokens"));
    if (cfg.has(s, "frequency_penalty")) p.frequency_penalty = std::stod(cfg.get(s, "frequency_penalty"));
    if (cfg.has(s, "presence_penalty")) p.presence_penalty = std::stod(cfg.get(s, "presence_penalty"));
    if (cfg.has(s, "seed")) p.seed = std::stoll(cfg.get(s, "seed"));
    if (cfg.has(s, "model")) p.model = cfg.get(s, "model");
    p.validate();
}

void apply_matching_config(const ConfigFile& cfg, MatchConfig& m) {
    const std::string s = "matching";
    if (cfg.has(s, "partial_ratio_threshold"))
        m.partial_ratio_threshold = std::stoi(cfg.get(s, "partial_ratio_threshold"));
    if (cfg.has(s, "normalize_unicode"))
        m.normalize_unicode = parse_bool(cfg.get(s, "normalize_unicode"), "normalize_unicode");
    m.validate();
}

void apply_training_config(const ConfigFile& cfg, TrainHyperparams& hp) {
    const std::string s = "training";
    if (cfg.has(s, "learning_rate")) hp.learning_rate = std::stod(cfg.get(s, "learning_rate"));
    if (cfg.has(s, "epochs")) hp.epochs = std::stoi(cfg.get(s, "epochs"));
    if (cfg.has(s, "batch_size")) hp.batch_size = std::stoi(cfg.get(s, "batch_size"));
    if (cfg.has(s, "shuffle_seed")) hp.shuffle_seed = std::stoull(cfg.get(s, "shuffle_seed"));
}

}  // namespace hallucimc
