#include "tnl/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tnl {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                          (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    auto u = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(u);
}

void ensure_parent(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

unsigned char gray_byte(double v) {
    v = std::min(1.0, std::max(0.0, v));
    return (unsigned char)(std::nearbyint(v * 255.0));  // half-even under default FP mode
}

}  // namespace

void write_gf01(const std::filesystem::path& path, const GridField& field) {
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os.write("GF01", 4);
    put_u32(os, std::uint32_t(field.comps));
    put_u32(os, std::uint32_t(field.desc.nx));
    put_u32(os, std::uint32_t(field.desc.ny));
    put_f64(os, field.desc.x0);
    put_f64(os, field.desc.y0);
    put_f64(os, field.desc.h);
    for (double v : field.data) put_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

GridField read_gf01(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, "GF01", 4) != 0)
        throw std::runtime_error("not a GF01 file: " + path.string());
    GridField f;
    f.comps = int(get_u32(is));
    f.desc.nx = get_u32(is);
    f.desc.ny = get_u32(is);
    f.desc.x0 = get_f64(is);
    f.desc.y0 = get_f64(is);
    f.desc.h = get_f64(is);
    f.data.resize(size_t(f.desc.nx) * size_t(f.desc.ny) * size_t(f.comps));
    for (auto& v : f.data) v = get_f64(is);
    if (!is) throw std::runtime_error("truncated GF01 file: " + path.string());
    return f;
}

void write_pgm(const std::filesystem::path& path, const GridField& scalar) {
    if (scalar.comps != 1) throw std::invalid_argument("PGM export needs a scalar field");
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << "P5\n" << scalar.desc.nx << " " << scalar.desc.ny << "\n255\n";
    for (std::int64_t j = scalar.desc.ny - 1; j >= 0; --j) {
        std::string row(size_t(scalar.desc.nx), '\0');
        for (std::int64_t i = 0; i < scalar.desc.nx; ++i)
            row[size_t(i)] = char(gray_byte(scalar.at(i, j)));
        os.write(row.data(), std::streamsize(row.size()));
    }
}

void write_pgm(const std::filesystem::path& path, const CellField& field) {
    GridDesc g;
    g.x0 = field.window().x0.to_double();
    g.y0 = field.window().y0.to_double();
    g.h = std::ldexp(1.0, -field.level());
    g.nx = field.cells_x();
    g.ny = field.cells_y();
    GridField f(g, 1);
    for (std::int64_t j = 0; j < g.ny; ++j)
        for (std::int64_t i = 0; i < g.nx; ++i)
            f.at(i, j) = field.value(field.origin_kx() + i, field.origin_ky() + j).to_double();
    write_pgm(path, f);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument("csv row width mismatch");
    std::string line;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    rows_.push_back(std::move(line));
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format(v));
    row(s);
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string CsvWriter::str() const {
    std::string out;
    for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

void CsvWriter::save(const std::filesystem::path& path) const {
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << str();
}

std::string cellfield_to_text(const CellField& field) {
    std::ostringstream os;
    const Window& w = field.window();
    os << "cellfield level=" << field.level() << " window=" << w.x0.to_decimal() << " "
       << w.y0.to_decimal() << " " << w.side.to_decimal() << "\n";
    for (std::int64_t j = 0; j < field.cells_y(); ++j) {
        for (std::int64_t i = 0; i < field.cells_x(); ++i) {
            if (i) os << ' ';
            Dyadic v = field.value(field.origin_kx() + i, field.origin_ky() + j);
            os << v.num << "/2^" << v.exp;
        }
        os << '\n';
    }
    return os.str();
}

CellField cellfield_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string head, lv, win;
    is >> head;
    if (head != "cellfield") throw std::runtime_error("not a cellfield dump");
    is >> lv >> win;
    if (lv.rfind("level=", 0) != 0 || win.rfind("window=", 0) != 0)
        throw std::runtime_error("malformed cellfield header");
    int level = std::stoi(lv.substr(6));
    std::string sx0 = win.substr(7), sy0, sside;
    is >> sy0 >> sside;
    Window w{parse_dyadic(sx0), parse_dyadic(sy0), parse_dyadic(sside)};
    CellField f(level, w);
    int max_exp = 0;
    std::vector<Dyadic> vals;
    vals.reserve(f.numerators().size());
    for (size_t k = 0; k < f.numerators().size(); ++k) {
        std::string tok;
        if (!(is >> tok)) throw std::runtime_error("truncated cellfield dump");
        Dyadic v = parse_dyadic(tok);
        max_exp = std::max(max_exp, v.exp);
        vals.push_back(v);
    }
    f.set_value_exp(max_exp);
    for (std::int64_t j = 0; j < f.cells_y(); ++j)
        for (std::int64_t i = 0; i < f.cells_x(); ++i) {
            Dyadic v = vals[size_t(j) * size_t(f.cells_x()) + size_t(i)];
            f.at(f.origin_kx() + i, f.origin_ky() + j) = v.num << (max_exp - v.exp);
        }
    f.normalize();
    return f;
}

void write_cellfield(const std::filesystem::path& path, const CellField& field) {
    ensure_parent(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os << cellfield_to_text(field);
}

CellField read_cellfield(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return cellfield_from_text(ss.str());
}

std::filesystem::path output_root() {
    if (const char* env = std::getenv("TNL_OUT")) return env;
    return "out";
}

std::string params_hash(const std::string& canonical_params) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_params) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

std::filesystem::path run_directory(const std::string& scenario, const std::string& params) {
    auto dir = output_root() / scenario / params_hash(params);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace tnl
