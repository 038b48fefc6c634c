// Minimal JSON Schema checker covering the subset used by the schemas in
// schemas/: type, enum, properties/required/additionalProperties, items,
// minItems, minimum/maximum, and local $ref. Plus a checker for the CSV
// column contracts (*.csvschema.json).
#ifndef DSC_TESTS_SCHEMA_CHECK_HPP
#define DSC_TESTS_SCHEMA_CHECK_HPP

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace schema_check {

using nlohmann::json;

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string schema_dir() {
    const char* dir = std::getenv("DSC_SCHEMAS");
    return dir ? dir : "schemas";
}

inline json load_schema(const std::string& name) {
    const std::string text = slurp(schema_dir() + "/" + name);
    return text.empty() ? json() : json::parse(text);
}

inline bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    return false;
}

inline const json* resolve_ref(const json& root, const std::string& ref) {
    if (ref.rfind("#/", 0) != 0) return nullptr;
    const json* node = &root;
    std::istringstream path(ref.substr(2));
    std::string key;
    while (std::getline(path, key, '/')) {
        if (!node->is_object() || !node->contains(key)) return nullptr;
        node = &(*node)[key];
    }
    return node;
}

inline void validate(const json& value, const json& schema, const json& root,
                     const std::string& path, std::vector<std::string>& errors) {
    if (schema.contains("$ref")) {
        const json* target = resolve_ref(root, schema["$ref"].get<std::string>());
        if (!target) {
            errors.push_back(path + ": unresolvable $ref " + schema["$ref"].get<std::string>());
            return;
        }
        validate(value, *target, root, path, errors);
        return;
    }
    if (schema.contains("type")) {
        const json& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(value, t.get<std::string>());
        } else {
            for (const auto& alt : t)
                if (type_matches(value, alt.get<std::string>())) ok = true;
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch (got " + std::string(value.type_name()) + ")");
            return;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& allowed : schema["enum"])
            if (value == allowed) ok = true;
        if (!ok) errors.push_back(path + ": value not in enum");
    }
    if (value.is_number() && schema.contains("minimum") &&
        value.get<double>() < schema["minimum"].get<double>())
        errors.push_back(path + ": below minimum");
    if (value.is_number() && schema.contains("maximum") &&
        value.get<double>() > schema["maximum"].get<double>())
        errors.push_back(path + ": above maximum");
    if (value.is_array()) {
        if (schema.contains("minItems") && value.size() < schema["minItems"].get<std::size_t>())
            errors.push_back(path + ": fewer than minItems elements");
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < value.size(); ++i)
                validate(value[i], schema["items"], root, path + "[" + std::to_string(i) + "]",
                         errors);
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& req : schema["required"])
                if (!value.contains(req.get<std::string>()))
                    errors.push_back(path + ": missing required key " + req.get<std::string>());
        }
        const json props = schema.value("properties", json::object());
        for (const auto& [key, sub] : value.items()) {
            if (props.contains(key)) {
                validate(sub, props[key], root, path + "." + key, errors);
            } else if (schema.contains("additionalProperties") &&
                       schema["additionalProperties"].is_boolean() &&
                       !schema["additionalProperties"].get<bool>()) {
                errors.push_back(path + ": unexpected key " + key);
            }
        }
    }
}

inline std::vector<std::string> check_json(const std::string& text,
                                           const std::string& schema_name) {
    std::vector<std::string> errors;
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        errors.push_back("document is not valid JSON");
        return errors;
    }
    const json schema = load_schema(schema_name);
    if (schema.is_null()) {
        errors.push_back("cannot load schema " + schema_name);
        return errors;
    }
    validate(value, schema, schema, "$", errors);
    return errors;
}

// CSV contract: header names (with alternates) and per-column parse types.
inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

inline bool parses_as(const std::string& text, const std::string& type) {
    if (type == "string") return true;
    if (type == "integer") {
        long v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        return ec == std::errc() && p == text.data() + text.size();
    }
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    return ec == std::errc() && p == text.data() + text.size();
}

inline std::vector<std::string> check_csv(const std::string& text,
                                          const std::string& schema_name) {
    std::vector<std::string> errors;
    const json schema = load_schema(schema_name);
    if (schema.is_null()) {
        errors.push_back("cannot load schema " + schema_name);
        return errors;
    }
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        errors.push_back("empty file");
        return errors;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_row(line);
    const json& columns = schema["columns"];
    const json& types = schema["types"];
    if (header.size() != columns.size()) {
        errors.push_back("header has " + std::to_string(header.size()) + " columns, expected " +
                         std::to_string(columns.size()));
        return errors;
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        bool ok = false;
        if (columns[i].is_string()) {
            ok = header[i] == columns[i].get<std::string>();
        } else {
            for (const auto& alt : columns[i])
                if (header[i] == alt.get<std::string>()) ok = true;
        }
        if (!ok) errors.push_back("unexpected header column " + std::to_string(i) + ": " + header[i]);
    }
    if (!errors.empty()) return errors;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto row = split_csv_row(line);
        if (row.size() != header.size()) {
            errors.push_back("line " + std::to_string(line_no) + ": wrong field count");
            continue;
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (!parses_as(row[i], types[i].get<std::string>()))
                errors.push_back("line " + std::to_string(line_no) + ": column " + header[i] +
                                 " does not parse as " + types[i].get<std::string>());
        }
    }
    return errors;
}

}  // namespace schema_check

#endif
