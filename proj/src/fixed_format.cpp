#include "rcifs/fixed_format.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcifs/errors.hpp"

namespace rcifs {

std::string fmt12(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0; // collapse -0.0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

namespace {

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace

JsonWriter::JsonWriter() {
    out_ = "{";
    first_in_scope_.push_back(true);
    scope_is_array_.push_back(false);
}

void JsonWriter::indent() {
    out_ += '\n';
    out_.append(2 * first_in_scope_.size(), ' ');
}

void JsonWriter::begin_entry(const std::string& key) {
    if (!first_in_scope_.back()) out_ += ',';
    first_in_scope_.back() = false;
    indent();
    out_ += '"';
    out_ += escape_json(key);
    out_ += "\": ";
}

void JsonWriter::begin_element() {
    if (!first_in_scope_.back()) out_ += ',';
    first_in_scope_.back() = false;
    indent();
}

void JsonWriter::key_string(const std::string& key, const std::string& value) {
    begin_entry(key);
    out_ += '"';
    out_ += escape_json(value);
    out_ += '"';
}

void JsonWriter::key_bool(const std::string& key, bool value) {
    begin_entry(key);
    out_ += value ? "true" : "false";
}

void JsonWriter::key_int(const std::string& key, std::int64_t value) {
    begin_entry(key);
    out_ += std::to_string(value);
}

void JsonWriter::key_float(const std::string& key, double value) {
    begin_entry(key);
    // Infinities are not valid JSON number tokens; emit them as strings so
    // the document stays parseable ("-inf" marks the log of a zero count).
    if (std::isfinite(value)) {
        out_ += fmt12(value);
    } else {
        out_ += '"';
        out_ += fmt12(value);
        out_ += '"';
    }
}

void JsonWriter::key_raw(const std::string& key, const std::string& tok) {
    begin_entry(key);
    out_ += tok;
}

void JsonWriter::open_object(const std::string& key) {
    begin_entry(key);
    out_ += '{';
    first_in_scope_.push_back(true);
    scope_is_array_.push_back(false);
}

void JsonWriter::open_array(const std::string& key) {
    begin_entry(key);
    out_ += '[';
    first_in_scope_.push_back(true);
    scope_is_array_.push_back(true);
}

void JsonWriter::element_float(double value) {
    begin_element();
    if (std::isfinite(value)) {
        out_ += fmt12(value);
    } else {
        out_ += '"';
        out_ += fmt12(value);
        out_ += '"';
    }
}

void JsonWriter::element_raw(const std::string& tok) {
    begin_element();
    out_ += tok;
}

void JsonWriter::open_object_element() {
    begin_element();
    out_ += '{';
    first_in_scope_.push_back(true);
    scope_is_array_.push_back(false);
}

void JsonWriter::close_object() {
    bool empty = first_in_scope_.back();
    first_in_scope_.pop_back();
    scope_is_array_.pop_back();
    if (!empty) indent();
    out_ += '}';
}

void JsonWriter::close_array() {
    bool empty = first_in_scope_.back();
    first_in_scope_.pop_back();
    scope_is_array_.pop_back();
    if (!empty) indent();
    out_ += ']';
}

std::string JsonWriter::str() const {
    if (first_in_scope_.size() != 1) {
        fail("internal_error", "JSON document has unclosed containers");
    }
    std::string doc = out_;
    if (!first_in_scope_.front()) doc += '\n';
    doc += "}\n";
    return doc;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += header[i];
    }
    out_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        fail("internal_error", "CSV row width " + std::to_string(cells.size()) +
                                   " != header width " + std::to_string(columns_));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ += ',';
        out_ += cells[i];
    }
    out_ += '\n';
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) fail("io_error", "cannot create directory " + target.parent_path().string());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail("io_error", "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail("io_error", "short write to " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) fail("io_error", "cannot rename " + tmp.string() + " to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("io_error", "cannot open " + path + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rcifs
