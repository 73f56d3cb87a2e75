#include "nsv/io/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nsv::io {

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("short write to '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

CsvWriter::CsvWriter(const std::string& path) : path_(path) {}

CsvWriter::~CsvWriter() = default;

void CsvWriter::comment(const std::string& text) {
    buf_ += "# ";
    buf_ += text;
    buf_ += '\n';
}

void CsvWriter::line(const std::string& text) {
    buf_ += text;
    buf_ += '\n';
}

void CsvWriter::close() {
    if (closed_) return;
    write_file_atomic(path_, buf_);
    closed_ = true;
}

} // namespace nsv::io
