#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vlab {

// Flat key/value run configuration. Keys are dotted paths (solver.dt); values
// stay verbatim strings until a typed getter parses them, so the canonical
// serialization -- and with it the config hash embedded in every artifact --
// is independent of float formatting choices.
struct Settings {
    std::map<std::string, std::string> kv; // sorted, deterministic

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    void set(const std::string& key, const std::string& value);

    // Getters return the default when the key is absent and throw
    // std::invalid_argument when the stored value does not parse.
    std::string get(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    // comma-separated doubles
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& dflt) const;

    // "key = value" lines, sorted by key
    std::string canonical() const;
    // FNV-1a 64 of canonical()
    std::uint64_t hash() const;
};

std::uint64_t fnv1a64(const std::string& text);

// key = value lines with dotted keys; [section] headers prefix the keys that
// follow; # starts a comment. Later duplicates win.
Settings parse_config_text(const std::string& text);

// JSON alternative: nested objects flatten to dotted keys, scalar arrays to
// comma lists. Arrays of containers are rejected.
Settings parse_config_json(const std::string& text);

// Dispatches on a .json suffix or a leading '{'.
Settings load_config_file(const std::string& path);

// --set key=value
void apply_override(Settings& s, const std::string& assignment);

// Rejects keys outside `allowed` (sorted or not), naming the offender and
// listing what would have been accepted.
void require_known_keys(const Settings& s, const std::vector<std::string>& allowed,
                        const std::string& context);

} // namespace vlab
