#include "npd/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "npd/errors.hpp"

namespace npd {

namespace {

constexpr char kMagic[4] = {'N', 'P', 'D', '1'};
constexpr std::uint32_t kMarker = 0x01020304u;

template <class T>
T byteswap(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
}

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    else return byteswap(v);
}

class Writer {
public:
    template <class T>
    void put(T v) {
        v = to_little(v);
        const auto* p = reinterpret_cast<const char*>(&v);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }
    void put_bytes(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class Reader {
public:
    Reader(std::vector<char> bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

    template <class T>
    T get(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return to_little(v);
    }
    std::string get_string(std::size_t n, const char* what) {
        need(n, what);
        std::string s(bytes_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    [[noreturn]] void fail(const std::string& msg) const { throw FormatError(path_ + ": " + msg); }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) fail(std::string("truncated file while reading ") + what);
    }

    std::vector<char> bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::string shape_of(const Grid& g) {
    std::ostringstream os;
    os << g.dim() << "D n=(";
    for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.n(a);
    os << ") L=(";
    for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << g.length(a);
    os << ")";
    return os.str();
}

}  // namespace

IonState Snapshot::to_state() const { return IonState{c1 - c2, c1 + c2, time}; }

Snapshot Snapshot::of(const IonState& state) {
    Snapshot s;
    s.grid = state.grid_ptr();
    s.time = state.time;
    s.c1 = state.c1();
    s.c2 = state.c2();
    return s;
}

void write_snapshot(const Snapshot& snap, const std::string& path) {
    const Grid& g = *snap.grid;
    Writer w;
    w.put_bytes(kMagic, 4);
    w.put(kMarker);
    w.put(static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) w.put(static_cast<std::uint32_t>(g.n(a)));
    for (int a = 0; a < g.dim(); ++a) w.put(g.length(a));
    w.put(snap.time);
    w.put(static_cast<std::uint32_t>(snap.field_names.size()));
    for (const auto& name : snap.field_names) {
        w.put(static_cast<std::uint32_t>(name.size()));
        w.put_bytes(name.data(), name.size());
    }
    for (double v : snap.c1.values()) w.put(v);
    for (double v : snap.c2.values()) w.put(v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw FormatError(path + ": write failed");
}

void write_snapshot(const IonState& state, const std::string& path) { write_snapshot(Snapshot::of(state), path); }

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open snapshot");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(bytes), path);

    if (r.get_string(4, "magic") != std::string(kMagic, 4)) r.fail("bad magic, not an NPD1 snapshot");
    if (r.get<std::uint32_t>("endianness marker") != kMarker) r.fail("bad endianness marker");
    const auto dim = r.get<std::uint32_t>("dim");
    if (dim != 2 && dim != 3) r.fail("dim = " + std::to_string(dim) + " is not 2 or 3");
    std::vector<int> n(dim);
    std::vector<double> length(dim);
    for (auto& v : n) {
        const auto x = r.get<std::uint32_t>("axis size");
        if (x < 8 || x % 2 != 0 || x > (1u << 16)) r.fail("axis size " + std::to_string(x) + " is invalid");
        v = static_cast<int>(x);
    }
    for (auto& v : length) v = r.get<double>("axis length");
    Snapshot s;
    try {
        s.grid = Grid::create(static_cast<int>(dim), n, length);
    } catch (const PreconditionError& e) {
        r.fail(e.what());
    }
    s.time = r.get<double>("time");
    const auto count = r.get<std::uint32_t>("field count");
    if (count != 2) r.fail("expected 2 fields, found " + std::to_string(count));
    s.field_names.clear();
    for (std::uint32_t f = 0; f < count; ++f) {
        const auto len = r.get<std::uint32_t>("field name length");
        if (len > 64) r.fail("field name too long");
        s.field_names.push_back(r.get_string(len, "field name"));
    }
    if (s.field_names != std::vector<std::string>{"c1", "c2"}) r.fail("fields must be c1, c2 in order");
    const std::size_t size = s.grid->size();
    if (r.remaining() != 2 * size * sizeof(double)) {
        r.fail("payload holds " + std::to_string(r.remaining()) + " bytes, header requires " +
               std::to_string(2 * size * sizeof(double)));
    }
    std::vector<double> c1(size), c2(size);
    for (auto& v : c1) v = r.get<double>("c1");
    for (auto& v : c2) v = r.get<double>("c2");
    s.c1 = RealField(s.grid, std::move(c1));
    s.c2 = RealField(s.grid, std::move(c2));
    return s;
}

Snapshot read_snapshot(const std::string& path, const Grid& expected) {
    Snapshot s = read_snapshot(path);
    if (!s.grid->same_shape(expected)) {
        throw FormatError(path + ": snapshot grid " + shape_of(*s.grid) + " does not match the configured grid " +
                          shape_of(expected));
    }
    return s;
}

}  // namespace npd
