#ifndef RCIFS_FIXED_FORMAT_HPP
#define RCIFS_FIXED_FORMAT_HPP

// Deterministic text emission. Every byte written by the experiment driver is
// a pure function of the values passed in: floats are rendered in fixed
// 12-significant-digit scientific notation, integers in full decimal, and
// JSON/CSV layout (key order, indentation, row order) is fixed by the caller.
// Files are written atomically (temp file + rename) so partial outputs are
// never observed.

#include <cstdint>
#include <string>
#include <vector>

namespace rcifs {

// 12 significant digits, scientific, e.g. "1.58496250072e+00".
// Negative zero is normalized to "0.00000000000e+00"; infinities render as
// "inf"/"-inf" (used for the logarithm of a zero count), NaN as "nan".
std::string fmt12(double x);

// Minimal ordered JSON document builder. Supports exactly what the summary
// files need: objects with insertion-ordered keys, arrays, strings, bools,
// 64-bit integers, fmt12 floats, and raw pre-rendered number tokens (used
// for exact big-integer counts). Output is pretty-printed with 2-space
// indentation and a trailing newline.
class JsonWriter {
public:
    JsonWriter();

    // Scalar appenders for the currently open object.
    void key_string(const std::string& key, const std::string& value);
    void key_bool(const std::string& key, bool value);
    void key_int(const std::string& key, std::int64_t value);
    void key_float(const std::string& key, double value);         // fmt12
    void key_raw(const std::string& key, const std::string& tok); // verbatim

    // Nested containers: every open_* must be matched by the close_* below.
    void open_object(const std::string& key);
    void open_array(const std::string& key);
    // Array element appenders (valid while an array is open).
    void element_float(double value);
    void element_raw(const std::string& tok);
    void open_object_element();
    void close_object();
    void close_array();

    std::string str() const; // complete document; all containers closed

private:
    void begin_entry(const std::string& key);
    void begin_element();
    void indent();

    std::string out_;
    std::vector<bool> first_in_scope_;
    std::vector<bool> scope_is_array_;
};

// CSV table with a fixed header; cells are pre-rendered strings (callers use
// fmt12 / std::to_string / decimal big-int text so the choice of rendering is
// explicit at the call site). Cells must not contain commas or newlines.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    const std::string& str() const { return out_; }

private:
    std::size_t columns_;
    std::string out_;
};

// Writes content to path via a temporary sibling file and rename, creating
// parent directories as needed. Throws Error("io_error", ...) on failure.
void atomic_write_file(const std::string& path, const std::string& content);

// Reads a whole file; throws Error("io_error", ...) if unreadable.
std::string read_file(const std::string& path);

} // namespace rcifs

#endif
