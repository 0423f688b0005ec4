#pragma once

// Line-oriented file I/O, gzip-compressed when the path ends in ".gz".

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <zlib.h>

namespace reflab {

inline bool is_gzip_path(const std::string& path) {
    return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

class LineWriter {
public:
    explicit LineWriter(const std::string& path) : path_(path) {
        if (is_gzip_path(path)) {
            // zlib writes a fixed header (no name, zero mtime), so output bytes
            // depend only on content.
            gz_ = gzopen(path.c_str(), "wb9");
            if (!gz_) throw std::runtime_error("cannot open " + path + " for writing");
        } else {
            out_.open(path, std::ios::binary | std::ios::trunc);
            if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        }
    }
    LineWriter(const LineWriter&) = delete;
    LineWriter& operator=(const LineWriter&) = delete;
    ~LineWriter() {
        if (gz_) gzclose(gz_);
    }

    void write(const std::string& line) {
        if (gz_) {
            if (!line.empty() && gzwrite(gz_, line.data(), static_cast<unsigned>(line.size())) <= 0)
                throw std::runtime_error("write failed: " + path_);
            if (gzputc(gz_, '\n') < 0) throw std::runtime_error("write failed: " + path_);
        } else {
            out_ << line << '\n';
            if (!out_) throw std::runtime_error("write failed: " + path_);
        }
    }

    void close() {
        if (gz_) {
            const int rc = gzclose(gz_);
            gz_ = nullptr;
            if (rc != Z_OK) throw std::runtime_error("close failed: " + path_);
        } else if (out_.is_open()) {
            out_.close();
            if (!out_) throw std::runtime_error("close failed: " + path_);
        }
    }

private:
    std::string path_;
    std::ofstream out_;
    gzFile gz_ = nullptr;
};

class LineReader {
public:
    explicit LineReader(const std::string& path) : path_(path) {
        if (is_gzip_path(path)) {
            gz_ = gzopen(path.c_str(), "rb");
            if (!gz_) throw std::runtime_error("cannot open " + path + " for reading");
        } else {
            in_.open(path, std::ios::binary);
            if (!in_) throw std::runtime_error("cannot open " + path + " for reading");
        }
    }
    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;
    ~LineReader() {
        if (gz_) gzclose(gz_);
    }

    /// Next line without its terminator; nullopt at end of file.
    std::optional<std::string> next() {
        std::string line;
        if (gz_) {
            char buf[8192];
            bool any = false;
            while (gzgets(gz_, buf, sizeof buf)) {
                any = true;
                line += buf;
                if (!line.empty() && line.back() == '\n') break;
            }
            int err = Z_OK;
            gzerror(gz_, &err);
            if (err != Z_OK && err != Z_STREAM_END) throw std::runtime_error("corrupt gzip stream: " + path_);
            if (!any) return std::nullopt;
            if (!line.empty() && line.back() == '\n') line.pop_back();
        } else if (!std::getline(in_, line)) {
            return std::nullopt;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no_;
        return line;
    }

    std::size_t line_number() const noexcept { return line_no_; }

private:
    std::string path_;
    std::ifstream in_;
    gzFile gz_ = nullptr;
    std::size_t line_no_ = 0;
};

}  // namespace reflab
