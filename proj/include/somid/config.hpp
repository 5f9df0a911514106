#pragma once

// Sectioned key/value config files: "[section]" headers, "key = value"
// lines, '#' comments. Values may be scalars or whitespace-separated lists.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace somid {

class Config {
  public:
    Config() = default;

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str(), path);
    }

    static Config parse(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                             ": unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                cfg.sections_[section];  // materialize even if empty
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.sections_[section][key] = value;
        }
        return cfg;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        return to_double(section, key, raw(section, key));
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = raw(section, key);
        std::size_t pos = 0;
        long out = 0;
        try {
            out = std::stol(v, &pos);
        } catch (const std::exception&) {
            throw std::runtime_error("config [" + section + "] " + key + ": '" + v +
                                     "' is not an integer");
        }
        if (pos != v.size())
            throw std::runtime_error("config [" + section + "] " + key + ": '" + v +
                                     "' is not an integer");
        return static_cast<int>(out);
    }

    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
        if (!has(section, key)) return fallback;
        std::istringstream in(raw(section, key));
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(to_double(section, key, tok));
        return out;
    }

    std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                         const std::vector<std::string>& fallback) const {
        if (!has(section, key)) return fallback;
        std::istringstream in(raw(section, key));
        std::vector<std::string> out;
        std::string tok;
        while (in >> tok) out.push_back(tok);
        return out;
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        sections_[section][key] = value;
    }

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
        for (const auto& [name, kv] : sections_) {
            out << "[" << name << "]\n";
            for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
            out << "\n";
        }
    }

  private:
    std::string raw(const std::string& section, const std::string& key) const {
        return sections_.at(section).at(key);
    }

    double to_double(const std::string& section, const std::string& key,
                     const std::string& v) const {
        std::size_t pos = 0;
        double out = 0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw std::runtime_error("config [" + section + "] " + key + ": '" + v +
                                     "' is not a number");
        }
        if (pos != v.size())
            throw std::runtime_error("config [" + section + "] " + key + ": '" + v +
                                     "' is not a number");
        return out;
    }

    static std::string trim(const std::string& s) {
        const auto first = s.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) return "";
        const auto last = s.find_last_not_of(" \t\r\n");
        return s.substr(first, last - first + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace somid
