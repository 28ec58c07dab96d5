#include "vlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vlab {
namespace {

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k)
{
    if (k.empty() || k.front() == '.' || k.back() == '.')
        return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            return false;
    return true;
}

double parse_double(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument("config: key '" + key + "' holds '" + v +
                                    "', expected a number");
    return x;
}

void flatten_json(const nlohmann::json& j, const std::string& prefix, Settings& out)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten_json(v, prefix.empty() ? k : prefix + "." + k, out);
        return;
    }
    if (prefix.empty())
        throw std::invalid_argument("config: top-level JSON must be an object");
    if (j.is_array()) {
        std::string joined;
        for (const auto& v : j) {
            if (v.is_structured())
                throw std::invalid_argument("config: key '" + prefix +
                                            "' holds an array of containers");
            if (!joined.empty())
                joined += ",";
            joined += v.is_string() ? v.get<std::string>() : v.dump();
        }
        out.set(prefix, joined);
        return;
    }
    out.set(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

} // namespace

void Settings::set(const std::string& key, const std::string& value)
{
    if (!valid_key(key))
        throw std::invalid_argument("config: bad key '" + key + "'");
    kv[key] = value;
}

std::string Settings::get(const std::string& key, const std::string& dflt) const
{
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

double Settings::get_double(const std::string& key, double dflt) const
{
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : parse_double(key, it->second);
}

int Settings::get_int(const std::string& key, int dflt) const
{
    const auto it = kv.find(key);
    if (it == kv.end())
        return dflt;
    const double x = parse_double(key, it->second);
    const int n = static_cast<int>(x);
    if (static_cast<double>(n) != x)
        throw std::invalid_argument("config: key '" + key + "' holds '" + it->second +
                                    "', expected an integer");
    return n;
}

bool Settings::get_bool(const std::string& key, bool dflt) const
{
    const auto it = kv.find(key);
    if (it == kv.end())
        return dflt;
    const std::string v = trim(it->second);
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw std::invalid_argument("config: key '" + key + "' holds '" + it->second +
                                "', expected a boolean");
}

std::vector<double> Settings::get_list(const std::string& key,
                                       const std::vector<double>& dflt) const
{
    const auto it = kv.find(key);
    if (it == kv.end())
        return dflt;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(key, item));
    if (out.empty())
        throw std::invalid_argument("config: key '" + key + "' holds an empty list");
    return out;
}

std::string Settings::canonical() const
{
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t Settings::hash() const { return fnv1a64(canonical()); }

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Settings parse_config_text(const std::string& text)
{
    Settings s;
    std::stringstream ss(text);
    std::string line, prefix;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash_at = line.find('#');
        if (hash_at != std::string::npos)
            line.erase(hash_at);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            const std::string sec = trim(line.substr(1, line.size() - 2));
            if (!sec.empty() && !valid_key(sec))
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": bad section name '" + sec + "'");
            prefix = sec.empty() ? "" : sec + ".";
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(prefix + key))
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad key '" + key + "'");
        s.kv[prefix + key] = trim(line.substr(eq + 1));
    }
    return s;
}

Settings parse_config_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: JSON parse failed: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("config: top-level JSON must be an object");
    Settings s;
    flatten_json(j, "", s);
    return s;
}

Settings load_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const bool json = (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) ||
                      trim(text).compare(0, 1, "{") == 0;
    return json ? parse_config_json(text) : parse_config_text(text);
}

void apply_override(Settings& s, const std::string& assignment)
{
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override '" + assignment + "': expected key=value");
    s.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void require_known_keys(const Settings& s, const std::vector<std::string>& allowed,
                        const std::string& context)
{
    std::vector<std::string> sorted = allowed;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [k, v] : s.kv) {
        if (std::binary_search(sorted.begin(), sorted.end(), k))
            continue;
        std::string msg = "unknown key '" + k + "' for " + context + "; valid keys:";
        for (const auto& a : sorted)
            msg += " " + a;
        throw std::invalid_argument(msg);
    }
}

} // namespace vlab
