#include "topoconverge/snapshot.hpp"

#include "topoconverge/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace topo {

namespace {

constexpr char nnph_magic[4] = {'N', 'N', 'P', 'H'};
constexpr std::uint32_t nnph_version = 1;

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

struct byte_reader {
    const unsigned char* p;
    std::size_t left;

    bool take(void* dst, std::size_t n) {
        if (left < n) return false;
        std::memcpy(dst, p, n);
        p += n;
        left -= n;
        return true;
    }

    bool u32(std::uint32_t& v) {
        unsigned char b[4];
        if (!take(b, 4)) return false;
        v = static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
            static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
        return true;
    }

    bool f32(float& f) {
        std::uint32_t v;
        if (!u32(v)) return false;
        f = std::bit_cast<float>(v);
        return true;
    }

    bool u8(std::uint8_t& v) { return take(&v, 1); }
};

bool bits_equal(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
    return true;
}

} // namespace

bool operator==(const layer_weights& a, const layer_weights& b) {
    return a.rows == b.rows && a.cols == b.cols && bits_equal(a.weights, b.weights) &&
           bits_equal(a.bias, b.bias);
}

bool operator==(const network_state& a, const network_state& b) {
    return a.step == b.step && a.layers == b.layers;
}

void validate(const network_state& state) {
    for (std::size_t i = 0; i < state.layers.size(); ++i) {
        const layer_weights& l = state.layers[i];
        if (l.rows < 1 || l.cols < 1)
            throw shape_mismatch("layer " + std::to_string(i) + ": rows and cols must be >= 1");
        if (l.weights.size() != static_cast<std::size_t>(l.rows) * l.cols)
            throw shape_mismatch("layer " + std::to_string(i) + ": weight payload size " +
                                 std::to_string(l.weights.size()) + " != rows*cols");
        if (!l.bias.empty() && l.bias.size() != l.rows)
            throw shape_mismatch("layer " + std::to_string(i) + ": bias length != rows");
        if (i + 1 < state.layers.size() && l.rows != state.layers[i + 1].cols)
            throw shape_mismatch("layer " + std::to_string(i) + ": rows " + std::to_string(l.rows) +
                                 " incompatible with next layer cols " +
                                 std::to_string(state.layers[i + 1].cols));
        for (float w : l.weights)
            if (!std::isfinite(w)) throw non_finite("layer " + std::to_string(i) + ": non-finite weight");
        for (float b : l.bias)
            if (!std::isfinite(b)) throw non_finite("layer " + std::to_string(i) + ": non-finite bias");
    }
    if (state.step < 0) throw shape_mismatch("negative step index");
}

network_state read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_failure("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    byte_reader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};

    char magic[4];
    if (!r.take(magic, 4) || std::memcmp(magic, nnph_magic, 4) != 0)
        throw bad_magic(path.string() + ": not an NNPH snapshot");
    std::uint32_t version;
    if (!r.u32(version) || version != nnph_version)
        throw bad_magic(path.string() + ": unsupported NNPH version");

    std::uint32_t layer_count;
    if (!r.u32(layer_count)) throw shape_mismatch(path.string() + ": truncated header");

    struct header {
        std::uint32_t rows, cols;
        std::uint8_t has_bias;
    };
    std::vector<header> headers(layer_count);
    unsigned __int128 expected_floats = 0;
    for (auto& h : headers) {
        if (!r.u32(h.rows) || !r.u32(h.cols) || !r.u8(h.has_bias))
            throw shape_mismatch(path.string() + ": truncated layer header");
        if (h.has_bias > 1) throw shape_mismatch(path.string() + ": bad has_bias flag");
        if (h.rows < 1 || h.cols < 1) throw shape_mismatch(path.string() + ": zero layer dimension");
        expected_floats += static_cast<unsigned __int128>(h.rows) * h.cols;
        if (h.has_bias) expected_floats += h.rows;
    }
    // declared payload must match the bytes actually present (checked before
    // any allocation, so corrupt headers cannot trigger huge resizes)
    if (expected_floats * 4 != r.left)
        throw shape_mismatch(path.string() + ": payload length disagrees with header");

    network_state state;
    state.layers.resize(layer_count);
    for (std::size_t i = 0; i < headers.size(); ++i) {
        state.layers[i].rows = headers[i].rows;
        state.layers[i].cols = headers[i].cols;
        state.layers[i].weights.resize(static_cast<std::size_t>(headers[i].rows) *
                                       headers[i].cols);
        if (headers[i].has_bias) state.layers[i].bias.resize(headers[i].rows);
    }
    for (auto& l : state.layers) {
        for (float& w : l.weights)
            if (!r.f32(w)) throw shape_mismatch(path.string() + ": payload shorter than header claims");
        for (float& b : l.bias)
            if (!r.f32(b)) throw shape_mismatch(path.string() + ": payload shorter than header claims");
    }
    if (r.left != 0) throw shape_mismatch(path.string() + ": trailing bytes after payload");

    state.step = parse_snapshot_step(path);
    validate(state);
    return state;
}

void write_snapshot(const network_state& state, const std::filesystem::path& path) {
    validate(state); // nothing is written for an invalid state

    std::string out;
    out.append(nnph_magic, 4);
    put_u32(out, nnph_version);
    put_u32(out, static_cast<std::uint32_t>(state.layers.size()));
    for (const auto& l : state.layers) {
        put_u32(out, l.rows);
        put_u32(out, l.cols);
        out.push_back(l.has_bias() ? 1 : 0);
    }
    for (const auto& l : state.layers) {
        for (float w : l.weights) put_f32(out, w);
        for (float b : l.bias) put_f32(out, b);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_failure("cannot open " + path.string() + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    f.flush();
    if (!f) throw io_failure("write failed: " + path.string());
}

std::string snapshot_filename(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "step_%08lld.nnph", static_cast<long long>(step));
    return buf;
}

std::int64_t parse_snapshot_step(const std::filesystem::path& path) {
    const std::string stem = path.stem().string();
    if (stem.rfind("step_", 0) != 0) return 0;
    const std::string digits = stem.substr(5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](unsigned char c) { return std::isdigit(c); }))
        return 0;
    return std::stoll(digits);
}

std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw io_failure(dir.string() + ": not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto& p = entry.path();
        if (p.extension() == ".nnph" && p.stem().string().rfind("step_", 0) == 0)
            files.push_back(p);
    }
    std::sort(files.begin(), files.end(),
              [](const std::filesystem::path& a, const std::filesystem::path& b) {
                  const auto sa = parse_snapshot_step(a), sb = parse_snapshot_step(b);
                  return sa != sb ? sa < sb : a.filename() < b.filename();
              });
    return files;
}

metric_series read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_failure("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw parse_error(path.string() + ": empty metrics file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,val_accuracy")
        throw parse_error(path.string() + ": expected header 'step,val_accuracy'");

    metric_series series;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw parse_error(path.string() + ":" + std::to_string(lineno) + ": missing comma");
        std::int64_t step;
        double acc;
        try {
            std::size_t used = 0;
            step = std::stoll(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("trailing junk");
            const std::string accs = line.substr(comma + 1);
            acc = std::stod(accs, &used);
            if (used != accs.size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw parse_error(path.string() + ":" + std::to_string(lineno) + ": bad number");
        }
        if (!(acc >= 0.0 && acc <= 1.0))
            throw parse_error(path.string() + ":" + std::to_string(lineno) +
                              ": accuracy outside [0,1]");
        if (!series.points.empty() && step <= series.points.back().step)
            throw non_monotone_steps(path.string() + ":" + std::to_string(lineno) +
                                     ": steps must be strictly increasing");
        series.points.push_back({step, acc});
    }
    return series;
}

void write_metrics(const metric_series& series, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "step,val_accuracy\n";
    char buf[64];
    for (const auto& p : series.points) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", static_cast<long long>(p.step),
                      p.val_accuracy);
        out << buf;
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_failure("cannot open " + path.string() + " for writing");
    f << out.str();
    if (!f) throw io_failure("write failed: " + path.string());
}

} // namespace topo
