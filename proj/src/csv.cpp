#include "agingmimo/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "agingmimo/scenario.hpp"  // IoError

namespace agingmimo {

std::string format_double(double v) {
    char buf[64];
    // 17 significant digits: enough to round-trip any double, locale-independent.
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

std::string format_int(long long v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    auto emit = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << fields[i];
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("write_csv: row width mismatch for " + path);
        emit(row);
    }
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace agingmimo
