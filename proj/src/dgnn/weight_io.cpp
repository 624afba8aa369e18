#include "dgnn/weight_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace dgnn {

namespace {

constexpr char kMagic[4] = {'D', 'G', 'N', 'W'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n)
            fail(ErrorCode::TruncatedFile, std::string("truncated ") + what + " at byte " + std::to_string(pos_));
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> serialize_weights(const WeightSet& w) {
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    put_u32(out, kWeightFileVersion);
    put_u32(out, static_cast<std::uint32_t>(w.size()));
    for (const auto& [name, t] : w) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
        for (auto d : t.dims)
            put_u32(out, d);
        for (float f : t.data) {
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_u32(out, bits);
        }
    }
    return out;
}

WeightSet deserialize_weights(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    auto magic = r.take(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0)
        fail(ErrorCode::BadMagic, "not a DGNW weight file");
    const auto version = r.u32("version");
    if (version != kWeightFileVersion)
        fail(ErrorCode::VersionMismatch,
             "weight file version " + std::to_string(version) + ", expected " + std::to_string(kWeightFileVersion));
    const auto count = r.u32("tensor count");

    WeightSet w;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = r.u32("name length");
        auto raw = r.take(name_len, "tensor name");
        std::string name(raw.begin(), raw.end());
        const auto rank = r.u32("rank");
        if (rank > kMaxTensorRank)
            fail(ErrorCode::ShapeOverflow, "tensor '" + name + "' has rank " + std::to_string(rank));
        Tensor t;
        std::uint64_t elems = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            t.dims.push_back(r.u32("dims"));
            elems *= t.dims.back();
            // a payload larger than what is left cannot be valid
            if (elems > std::numeric_limits<std::uint32_t>::max() || elems * 4 > bytes.size())
                fail(ErrorCode::ShapeOverflow, "tensor '" + name + "' shape exceeds file size");
        }
        auto payload = r.take(static_cast<std::size_t>(elems) * 4, "tensor payload");
        t.data.resize(static_cast<std::size_t>(elems));
        for (std::size_t k = 0; k < t.data.size(); ++k) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b)
                bits |= static_cast<std::uint32_t>(payload[4 * k + b]) << (8 * b);
            std::memcpy(&t.data[k], &bits, 4);
            if (!std::isfinite(t.data[k]))
                fail(ErrorCode::NonFiniteValue, "tensor '" + name + "' element " + std::to_string(k) + " is not finite");
        }
        if (w.contains(name))
            fail(ErrorCode::DuplicateTensor, "tensor '" + name + "' appears twice");
        w.insert(std::move(name), std::move(t));
    }
    if (r.remaining() != 0)
        fail(ErrorCode::TrailingData, std::to_string(r.remaining()) + " bytes after last tensor");
    return w;
}

void save_weights(const WeightSet& w, const std::string& path) {
    const auto bytes = serialize_weights(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        fail(ErrorCode::IoError, "write failed for '" + path + "'");
}

WeightSet load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_weights(bytes);
}

} // namespace dgnn
