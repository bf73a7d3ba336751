#pragma once
// Small helpers for artifact files: `# key=value` header blocks shared by
// every stage output, plus line-oriented gzip readers/writers (zlib).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace kgr {

// Ordered key=value metadata written as leading `# key=value` lines.
struct ArtifactHeader {
    std::string kind;
    std::map<std::string, std::string> meta;

    void set(const std::string& key, const std::string& value) { meta[key] = value; }
    void set_u64(const std::string& key, std::uint64_t value) { meta[key] = std::to_string(value); }
    const std::string& require(const std::string& key) const;
    std::uint64_t require_u64(const std::string& key) const;
    double require_double(const std::string& key) const;
};

std::string header_to_text(const ArtifactHeader& h);
// Consumes leading '#' lines from `lines_begin` iterator style input.
// Used by the plain/gz readers below.

class GzLineWriter {
public:
    explicit GzLineWriter(const std::filesystem::path& path);
    ~GzLineWriter();
    GzLineWriter(const GzLineWriter&) = delete;
    GzLineWriter& operator=(const GzLineWriter&) = delete;
    void write(const std::string& line);  // appends '\n'
    void close();

private:
    void* gz_ = nullptr;
    std::string path_;
};

class GzLineReader {
public:
    explicit GzLineReader(const std::filesystem::path& path);
    ~GzLineReader();
    GzLineReader(const GzLineReader&) = delete;
    GzLineReader& operator=(const GzLineReader&) = delete;
    bool next(std::string& line);

private:
    void* gz_ = nullptr;
    std::vector<char> buf_;
};

// Plain-text artifact helpers. Readers return the remaining data lines.
void write_artifact(const std::filesystem::path& path, const ArtifactHeader& header,
                    const std::vector<std::string>& lines);
ArtifactHeader read_artifact(const std::filesystem::path& path, std::vector<std::string>& lines);

// Gz variants.
void write_artifact_gz(const std::filesystem::path& path, const ArtifactHeader& header,
                       const std::vector<std::string>& lines);
ArtifactHeader read_artifact_gz(const std::filesystem::path& path, std::vector<std::string>& lines);

std::vector<std::string> split_tabs(const std::string& line);

}  // namespace kgr
