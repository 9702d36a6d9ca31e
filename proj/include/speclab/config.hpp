#pragma once

// JSON run configs. Parsing rejects duplicate keys; Section wraps one object
// and records which keys were read so leftovers can be reported as unknown.

#include <set>
#include <string_view>

#include <json.hpp>

#include "speclab/types.hpp"

namespace speclab::config {

using Json = nlohmann::json;

namespace detail {

inline std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline Json parse_json(std::string_view text) {
    // One key set per open object; arrays get an unused placeholder so the
    // stack depth tracks the parser's.
    std::vector<std::pair<std::string, std::set<std::string>>> open;
    std::vector<std::string> last_key{""};
    auto cb = [&](int, Json::parse_event_t ev, Json& parsed) {
        using E = Json::parse_event_t;
        switch (ev) {
            case E::object_start:
            case E::array_start: {
                std::string path = open.empty() ? "" : open.back().first;
                const std::string& k = last_key.back();
                if (!k.empty()) path += (path.empty() ? "" : ".") + k;
                open.emplace_back(std::move(path), std::set<std::string>{});
                last_key.emplace_back();
                break;
            }
            case E::object_end:
            case E::array_end:
                open.pop_back();
                last_key.pop_back();
                if (!last_key.empty()) last_key.back().clear();
                break;
            case E::key: {
                const auto key = parsed.get<std::string>();
                if (!open.back().second.insert(key).second) {
                    const auto& where = open.back().first;
                    throw Error(ErrorKind::Schema, "duplicate key '" + key + "'" +
                                                       (where.empty() ? "" : " in '" + where + "'"));
                }
                last_key.back() = key;
                break;
            }
            case E::value:
                last_key.back().clear();
                break;
        }
        return true;
    };
    try {
        return Json::parse(text.begin(), text.end(), cb);
    } catch (const Json::parse_error& e) {
        std::string msg = e.what();
        if (const auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
        throw Error(ErrorKind::Parse, detail::line_col(text, e.byte) + ": " + msg);
    }
}

class Section {
public:
    Section(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j.is_object()) throw Error(ErrorKind::Schema, where() + " must be an object");
    }

    bool has(const std::string& key) const { return j_->contains(key); }

    const Json& raw(const std::string& key) {
        if (!has(key)) throw Error(ErrorKind::Schema, "missing key '" + qualified(key) + "'");
        used_.insert(key);
        return j_->at(key);
    }

    double number(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number()) throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::int64_t integer(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number_integer())
            throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be an integer");
        return v.get<std::int64_t>();
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        return has(key) ? integer(key) : fallback;
    }
    int small_int(const std::string& key, int fallback) {
        const auto v = integer(key, fallback);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            throw Error(ErrorKind::Schema, "'" + qualified(key) + "' out of range");
        return static_cast<int>(v);
    }

    std::string string(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_string()) throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        return has(key) ? string(key) : fallback;
    }

    std::vector<double> numbers(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_array()) throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be an array");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number())
                throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must hold numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    std::vector<std::vector<double>> rows(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_array()) throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be an array");
        std::vector<std::vector<double>> out;
        for (const auto& r : v) {
            if (!r.is_array())
                throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be an array of arrays");
            std::vector<double> row;
            for (const auto& x : r) {
                if (!x.is_number())
                    throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must hold numbers");
                row.push_back(x.get<double>());
            }
            out.push_back(std::move(row));
        }
        return out;
    }

    Section section(const std::string& key) { return Section(raw(key), qualified(key)); }

    std::vector<Section> sections(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_array()) throw Error(ErrorKind::Schema, "'" + qualified(key) + "' must be an array");
        std::vector<Section> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.emplace_back(v[i], qualified(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    /// Throws on the first key that was never read.
    void finish() const {
        for (const auto& [k, v] : j_->items())
            if (!used_.count(k)) throw Error(ErrorKind::Schema, "unknown key '" + qualified(k) + "'");
    }

    const std::string& path() const { return path_; }
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

    const Json* j_;
    std::string path_;
    std::set<std::string> used_;
};

/// "3" -> {3}, "0,-1" -> {0,-1}; whitespace around entries is allowed.
inline IntTuple parse_int_tuple(const std::string& key, std::size_t arity, const std::string& where) {
    IntTuple out;
    std::size_t pos = 0;
    while (pos <= key.size()) {
        const auto comma = std::min(key.find(',', pos), key.size());
        std::string tok = key.substr(pos, comma - pos);
        const auto b = tok.find_first_not_of(' '), e = tok.find_last_not_of(' ');
        tok = b == std::string::npos ? "" : tok.substr(b, e - b + 1);
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size() || v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
                throw std::invalid_argument(tok);
            out.push_back(static_cast<int>(v));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Schema, "'" + where + "': key '" + key + "' is not a comma-joined integer tuple");
        }
        pos = comma + 1;
    }
    if (out.size() != arity)
        throw Error(ErrorKind::Schema, "'" + where + "': key '" + key + "' should have " +
                                           std::to_string(arity) + " entries");
    return out;
}

/// {"default": x, "table": {"m" | "m,n": value}}
inline std::pair<double, std::map<IntTuple, double>> read_table(Section s, std::size_t arity) {
    std::pair<double, std::map<IntTuple, double>> out{s.number("default", 0.0), {}};
    if (s.has("table")) {
        const auto& t = s.raw("table");
        if (!t.is_object()) throw Error(ErrorKind::Schema, "'" + s.qualified("table") + "' must be an object");
        for (const auto& [k, v] : t.items()) {
            if (!v.is_number())
                throw Error(ErrorKind::Schema, "'" + s.qualified("table") + "." + k + "' must be a number");
            if (!out.second.emplace(parse_int_tuple(k, arity, s.qualified("table")), v.get<double>()).second)
                throw Error(ErrorKind::Schema, "'" + s.qualified("table") + "': key '" + k + "' repeats an index");
        }
    }
    s.finish();
    return out;
}

inline IntFunction read_int_function(Section s, std::size_t arity) {
    auto [d, t] = read_table(std::move(s), arity);
    return IntFunction(arity, d, std::move(t));
}

}  // namespace speclab::config
