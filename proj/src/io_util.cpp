#include "kgr/io_util.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kgr {

const std::string& ArtifactHeader::require(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end())
        throw std::runtime_error("artifact header missing key '" + key + "' (kind=" + kind + ")");
    return it->second;
}

std::uint64_t ArtifactHeader::require_u64(const std::string& key) const {
    return std::stoull(require(key));
}

double ArtifactHeader::require_double(const std::string& key) const {
    return std::stod(require(key));
}

std::string header_to_text(const ArtifactHeader& h) {
    std::string out = "# kind=" + h.kind + "\n";
    for (const auto& [k, v] : h.meta) out += "# " + k + "=" + v + "\n";
    return out;
}

namespace {

bool parse_header_line(const std::string& line, ArtifactHeader& h) {
    if (line.empty() || line[0] != '#') return false;
    std::size_t start = line.find_first_not_of(" \t", 1);
    if (start == std::string::npos) return true;  // bare comment
    auto eq = line.find('=', start);
    if (eq == std::string::npos) return true;
    std::string key = line.substr(start, eq - start);
    std::string value = line.substr(eq + 1);
    if (key == "kind")
        h.kind = value;
    else
        h.meta[key] = value;
    return true;
}

}  // namespace

GzLineWriter::GzLineWriter(const std::filesystem::path& path) : path_(path.string()) {
    gz_ = gzopen(path_.c_str(), "wb");
    if (!gz_) throw std::runtime_error("cannot open for gz write: " + path_);
}

GzLineWriter::~GzLineWriter() { close(); }

void GzLineWriter::write(const std::string& line) {
    if (gzwrite(static_cast<gzFile>(gz_), line.data(), static_cast<unsigned>(line.size())) !=
            static_cast<int>(line.size()) ||
        gzwrite(static_cast<gzFile>(gz_), "\n", 1) != 1)
        throw std::runtime_error("gz write failed: " + path_);
}

void GzLineWriter::close() {
    if (gz_) {
        gzclose(static_cast<gzFile>(gz_));
        gz_ = nullptr;
    }
}

GzLineReader::GzLineReader(const std::filesystem::path& path) : buf_(1 << 16) {
    gz_ = gzopen(path.string().c_str(), "rb");
    if (!gz_) throw std::runtime_error("cannot open for gz read: " + path.string());
}

GzLineReader::~GzLineReader() {
    if (gz_) gzclose(static_cast<gzFile>(gz_));
}

bool GzLineReader::next(std::string& line) {
    line.clear();
    for (;;) {
        if (!gzgets(static_cast<gzFile>(gz_), buf_.data(), static_cast<int>(buf_.size())))
            return !line.empty();
        line += buf_.data();
        if (!line.empty() && line.back() == '\n') {
            line.pop_back();
            return true;
        }
        // long line: keep appending
    }
}

void write_artifact(const std::filesystem::path& path, const ArtifactHeader& header,
                    const std::vector<std::string>& lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write artifact: " + path.string());
    out << header_to_text(header);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ArtifactHeader read_artifact(const std::filesystem::path& path, std::vector<std::string>& lines) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read artifact: " + path.string());
    ArtifactHeader h;
    std::string line;
    bool in_header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (in_header && parse_header_line(line, h)) continue;
        in_header = false;
        if (!line.empty()) lines.push_back(line);
    }
    return h;
}

void write_artifact_gz(const std::filesystem::path& path, const ArtifactHeader& header,
                       const std::vector<std::string>& lines) {
    GzLineWriter w(path);
    std::string head = header_to_text(header);
    if (!head.empty() && head.back() == '\n') head.pop_back();
    w.write(head);
    for (const auto& l : lines) w.write(l);
    w.close();
}

ArtifactHeader read_artifact_gz(const std::filesystem::path& path, std::vector<std::string>& lines) {
    GzLineReader r(path);
    ArtifactHeader h;
    std::string line;
    bool in_header = true;
    while (r.next(line)) {
        if (in_header && parse_header_line(line, h)) continue;
        in_header = false;
        if (!line.empty()) lines.push_back(line);
    }
    return h;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

}  // namespace kgr
