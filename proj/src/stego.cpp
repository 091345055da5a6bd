#include "revadv/stego.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "revadv/crc32.hpp"
#include "revadv/errors.hpp"
#include "revadv/huffman.hpp"
#include "revadv/rng.hpp"

namespace revadv {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

}  // namespace

void keystream_xor(std::vector<std::uint8_t>& bytes, const std::string& key, std::size_t skip) {
    if (key.empty()) throw FormatError("keystream: key required when encryption is enabled");
    Rng rng(fnv1a64(key));
    std::size_t pos = 0;
    std::uint64_t word = 0;
    int avail = 0;
    auto next_byte = [&] {
        if (avail == 0) {
            word = rng.next();
            avail = 8;
        }
        const auto b = static_cast<std::uint8_t>(word & 0xFF);
        word >>= 8;
        --avail;
        return b;
    };
    for (std::size_t i = 0; i < skip; ++i) next_byte();
    for (pos = 0; pos < bytes.size(); ++pos) bytes[pos] ^= next_byte();
}

std::vector<std::uint8_t> build_payload(const StageMatrix& stages, const std::string& key,
                                        StegoMode mode) {
    if (!stages.valid_alphabet()) throw FormatError("payload: stage symbol outside alphabet");
    if (stages.h <= 0 || stages.w <= 0 || stages.h > 0xFFFF || stages.w > 0xFFFF)
        throw FormatError("payload: stage dimensions out of range");
    if (stages.xi <= 0 || stages.xi > 255) throw FormatError("payload: xi out of range");

    const HuffmanTable table = huffman_build(stage_histogram(stages));
    const std::vector<bool> bits = huffman_encode(stages, table);

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kPayloadMagic, kPayloadMagic + 4);
    out.push_back(kPayloadVersion);
    out.push_back(static_cast<std::uint8_t>(mode));
    out.push_back(static_cast<std::uint8_t>(stages.xi));
    put_u16(out, static_cast<std::uint16_t>(stages.h));
    put_u16(out, static_cast<std::uint16_t>(stages.w));
    // 5 x 2-bit code lengths, MSB-first, low 6 bits of the second byte zero
    out.push_back(static_cast<std::uint8_t>((table.lengths[0] << 6) | (table.lengths[1] << 4) |
                                            (table.lengths[2] << 2) | table.lengths[3]));
    out.push_back(static_cast<std::uint8_t>(table.lengths[4] << 6));
    put_u32(out, static_cast<std::uint32_t>(bits.size()));

    std::uint8_t acc = 0;
    int nb = 0;
    for (bool b : bits) {
        acc = static_cast<std::uint8_t>((acc << 1) | (b ? 1 : 0));
        if (++nb == 8) {
            out.push_back(acc);
            acc = 0;
            nb = 0;
        }
    }
    if (nb > 0) out.push_back(static_cast<std::uint8_t>(acc << (8 - nb)));

    const std::uint32_t crc = crc32(out);
    put_u32(out, crc);

    std::vector<std::uint8_t> protected_part(out.begin() + 5, out.end());
    keystream_xor(protected_part, key);
    std::copy(protected_part.begin(), protected_part.end(), out.begin() + 5);
    return out;
}

StageMatrix parse_payload(const std::vector<std::uint8_t>& bytes, const std::string& key,
                          StegoMode* mode_out) {
    if (bytes.size() < kPayloadHeaderBytes + 4)
        throw FormatError("payload: truncated before header (" + std::to_string(bytes.size()) +
                          " bytes)");
    if (std::memcmp(bytes.data(), kPayloadMagic, 4) != 0)
        throw FormatError("payload: bad magic");
    if (bytes[4] != kPayloadVersion)
        throw FormatError("payload: unsupported version " + std::to_string(bytes[4]));

    std::vector<std::uint8_t> plain(bytes.begin() + 5, bytes.end());
    keystream_xor(plain, key);

    const std::uint8_t mode_byte = plain[0];
    const int xi = plain[1];
    const int h = get_u16(&plain[2]);
    const int w = get_u16(&plain[4]);
    std::array<std::uint8_t, kStageSymbols> lengths{};
    lengths[0] = (plain[6] >> 6) & 0x3;
    lengths[1] = (plain[6] >> 4) & 0x3;
    lengths[2] = (plain[6] >> 2) & 0x3;
    lengths[3] = plain[6] & 0x3;
    lengths[4] = (plain[7] >> 6) & 0x3;
    const std::uint32_t bit_count = get_u32(&plain[8]);

    const std::size_t stream_bytes = (bit_count + 7) / 8;
    const std::size_t expect = kPayloadHeaderBytes + stream_bytes + 4;
    if (mode_byte > 1 || xi == 0 || h == 0 || w == 0 || bytes.size() != expect)
        throw IntegrityError("payload: header integrity check failed (wrong key or corrupted)");

    // CRC over the plaintext prefix (magic+version stayed in clear)
    std::vector<std::uint8_t> plain_full(bytes.begin(), bytes.begin() + 5);
    plain_full.insert(plain_full.end(), plain.begin(), plain.end() - 4);
    const std::uint32_t stored = get_u32(&plain[plain.size() - 4]);
    if (crc32(plain_full) != stored)
        throw IntegrityError("payload: CRC mismatch (wrong key or tampered payload)");

    HuffmanTable table = HuffmanTable::from_lengths(lengths);
    std::vector<bool> bits;
    bits.reserve(bit_count);
    for (std::uint32_t i = 0; i < bit_count; ++i) {
        const std::uint8_t byte = plain[12 + i / 8];
        bits.push_back(((byte >> (7 - i % 8)) & 1u) != 0);
    }
    StageMatrix stages = huffman_decode(bits, table, h, w, xi);
    if (mode_out) *mode_out = static_cast<StegoMode>(mode_byte);
    return stages;
}

std::vector<bool> bits_from_bytes(const std::vector<std::uint8_t>& bytes) {
    std::vector<bool> bits;
    bits.reserve(bytes.size() * 8);
    for (auto b : bytes)
        for (int j = 0; j < 8; ++j) bits.push_back(((b >> j) & 1u) != 0);
    return bits;
}

std::vector<std::uint8_t> bytes_from_bits(const std::vector<bool>& bits) {
    if (bits.size() % 8 != 0) throw FormatError("bit stream is not byte aligned");
    std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    return bytes;
}

ImageU8 lsb_embed(const ImageU8& carrier, const std::vector<bool>& bits, std::size_t offset) {
    if (offset + bits.size() > carrier.numel())
        throw CapacityError("lsb_embed: payload needs " + std::to_string(offset + bits.size()) +
                            " bits, carrier holds " + std::to_string(carrier.numel()));
    ImageU8 out = carrier;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        auto& px = out.data[offset + i];
        px = static_cast<std::uint8_t>((px & 0xFE) | (bits[i] ? 1 : 0));
    }
    return out;
}

std::vector<bool> lsb_extract(const ImageU8& stego, std::size_t nbits, std::size_t offset) {
    if (offset + nbits > stego.numel())
        throw FormatError("lsb_extract: requested " + std::to_string(offset + nbits) +
                          " bits beyond image capacity " + std::to_string(stego.numel()));
    std::vector<bool> bits(nbits);
    for (std::size_t i = 0; i < nbits; ++i) bits[i] = (stego.data[offset + i] & 1u) != 0;
    return bits;
}

// ---------------------------------------------------------------------------
// Histogram shifting
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kHsReserved = 768;  // scan positions carrying pass metadata
constexpr std::size_t kHsMetaBytes = kHsReserved / 8;
constexpr std::size_t kHsFixedMeta = 8;  // magic(2) version(1) passes(1) bitcount(4)
constexpr std::size_t kHsMaxPasses = (kHsMetaBytes - kHsFixedMeta) / 3;

struct HsPass {
    std::uint8_t channel;
    std::uint8_t peak;
    std::uint8_t zero;
};

// value histogram of one channel over positions with linear index >= kHsReserved
std::array<std::uint32_t, 256> channel_histogram(const ImageU8& img, int channel) {
    std::array<std::uint32_t, 256> h{};
    for (std::size_t idx = kHsReserved; idx < img.numel(); ++idx) {
        if (static_cast<int>(idx % static_cast<std::size_t>(img.c)) != channel) continue;
        ++h[img.data[idx]];
    }
    return h;
}

}  // namespace

ImageU8 hs_embed(const ImageU8& carrier, const std::vector<bool>& bits) {
    if (carrier.numel() <= kHsReserved)
        throw CapacityError("hs_embed: image too small for the metadata region");

    ImageU8 out = carrier;

    // Original LSBs of the reserved region ride along at the payload front.
    std::vector<bool> full;
    full.reserve(kHsReserved + bits.size());
    for (std::size_t i = 0; i < kHsReserved; ++i) full.push_back((carrier.data[i] & 1u) != 0);
    full.insert(full.end(), bits.begin(), bits.end());

    std::vector<HsPass> passes;
    std::size_t cursor = 0;
    while (cursor < full.size()) {
        if (passes.size() >= kHsMaxPasses)
            throw CapacityError("hs_embed: pass budget exhausted; use lsb mode");

        // Best (peak, zero) pair over all channels: the largest current peak
        // that still has an empty bin to shift into.
        int channel = -1, peak = -1, zero = -1;
        std::uint32_t peak_count = 0;
        for (int ch = 0; ch < carrier.c; ++ch) {
            const auto hist = channel_histogram(out, ch);
            int best_v = -1;
            std::uint32_t best_n = 0;
            for (int v = 0; v < 256; ++v) {
                if (hist[static_cast<std::size_t>(v)] > best_n) {
                    best_n = hist[static_cast<std::size_t>(v)];
                    best_v = v;
                }
            }
            if (best_v < 0 || best_n <= peak_count) continue;
            int z = -1;
            for (int dist = 1; dist < 256 && z < 0; ++dist) {
                for (int sign : {+1, -1}) {
                    const int cand = best_v + sign * dist;
                    if (cand >= 0 && cand < 256 && hist[static_cast<std::size_t>(cand)] == 0) {
                        z = cand;
                        break;
                    }
                }
            }
            if (z < 0) continue;
            channel = ch;
            peak = best_v;
            zero = z;
            peak_count = best_n;
        }
        if (channel < 0)
            throw CapacityError("hs_embed: insufficient peak capacity (" + std::to_string(cursor) +
                                " of " + std::to_string(full.size()) +
                                " bits placed); use lsb mode");

        const int toward = zero > peak ? 1 : -1;
        // shift the open interval (peak, zero) by one toward zero
        for (std::size_t idx = kHsReserved; idx < out.numel(); ++idx) {
            if (static_cast<int>(idx % static_cast<std::size_t>(out.c)) != channel) continue;
            const int v = out.data[idx];
            if ((toward > 0 && v > peak && v < zero) || (toward < 0 && v < peak && v > zero))
                out.data[idx] = static_cast<std::uint8_t>(v + toward);
        }
        // embed at the peak
        for (std::size_t idx = kHsReserved; idx < out.numel() && cursor < full.size(); ++idx) {
            if (static_cast<int>(idx % static_cast<std::size_t>(out.c)) != channel) continue;
            if (out.data[idx] != static_cast<std::uint8_t>(peak)) continue;
            if (full[cursor++]) out.data[idx] = static_cast<std::uint8_t>(peak + toward);
        }
        passes.push_back({static_cast<std::uint8_t>(channel), static_cast<std::uint8_t>(peak),
                          static_cast<std::uint8_t>(zero)});
    }

    std::vector<std::uint8_t> meta;
    meta.push_back('H');
    meta.push_back('S');
    meta.push_back(1);
    meta.push_back(static_cast<std::uint8_t>(passes.size()));
    put_u32(meta, static_cast<std::uint32_t>(full.size()));
    for (const auto& p : passes) {
        meta.push_back(p.channel);
        meta.push_back(p.peak);
        meta.push_back(p.zero);
    }
    meta.resize(kHsMetaBytes, 0);
    const std::vector<bool> meta_bits = bits_from_bytes(meta);
    for (std::size_t i = 0; i < kHsReserved; ++i)
        out.data[i] = static_cast<std::uint8_t>((out.data[i] & 0xFE) | (meta_bits[i] ? 1 : 0));
    return out;
}

HsExtracted hs_extract(const ImageU8& stego) {
    if (stego.numel() <= kHsReserved)
        throw FormatError("hs_extract: image too small for the metadata region");
    std::vector<bool> meta_bits(kHsReserved);
    for (std::size_t i = 0; i < kHsReserved; ++i) meta_bits[i] = (stego.data[i] & 1u) != 0;
    const std::vector<std::uint8_t> meta = bytes_from_bits(meta_bits);
    if (meta[0] != 'H' || meta[1] != 'S') throw FormatError("hs_extract: bad metadata magic");
    if (meta[2] != 1) throw FormatError("hs_extract: unsupported metadata version");
    const std::size_t n_passes = meta[3];
    const std::uint32_t total_bits = get_u32(&meta[4]);
    if (n_passes > kHsMaxPasses || total_bits < kHsReserved)
        throw FormatError("hs_extract: corrupt metadata");
    std::vector<HsPass> passes(n_passes);
    for (std::size_t i = 0; i < n_passes; ++i) {
        passes[i] = {meta[kHsFixedMeta + 3 * i], meta[kHsFixedMeta + 3 * i + 1],
                     meta[kHsFixedMeta + 3 * i + 2]};
    }

    ImageU8 carrier = stego;
    std::vector<std::vector<bool>> pass_bits(n_passes);
    // pass sizes: every pass but the last embedded to peak exhaustion; undo in
    // reverse, collecting bits, then trim the concatenation to total_bits.
    for (std::size_t pi = n_passes; pi-- > 0;) {
        const HsPass& p = passes[pi];
        if (p.channel >= carrier.c) throw FormatError("hs_extract: corrupt pass channel");
        const int toward = p.zero > p.peak ? 1 : -1;
        auto& bits = pass_bits[pi];
        for (std::size_t idx = kHsReserved; idx < carrier.numel(); ++idx) {
            if (static_cast<int>(idx % static_cast<std::size_t>(carrier.c)) != p.channel) continue;
            const int v = carrier.data[idx];
            if (v == p.peak) {
                bits.push_back(false);
            } else if (v == p.peak + toward) {
                bits.push_back(true);
                carrier.data[idx] = p.peak;
            }
        }
        // unshift the interval
        for (std::size_t idx = kHsReserved; idx < carrier.numel(); ++idx) {
            if (static_cast<int>(idx % static_cast<std::size_t>(carrier.c)) != p.channel) continue;
            const int v = carrier.data[idx];
            if ((toward > 0 && v > p.peak + 1 && v <= p.zero) ||
                (toward < 0 && v < p.peak - 1 && v >= p.zero))
                carrier.data[idx] = static_cast<std::uint8_t>(v - toward);
        }
    }

    std::vector<bool> full;
    for (const auto& pb : pass_bits) full.insert(full.end(), pb.begin(), pb.end());
    if (full.size() < total_bits) throw FormatError("hs_extract: payload shorter than declared");
    full.resize(total_bits);

    for (std::size_t i = 0; i < kHsReserved; ++i)
        carrier.data[i] = static_cast<std::uint8_t>((carrier.data[i] & 0xFE) | (full[i] ? 1 : 0));
    return {std::vector<bool>(full.begin() + kHsReserved, full.end()), std::move(carrier)};
}

// ---------------------------------------------------------------------------
// Container operations
// ---------------------------------------------------------------------------

ImageU8 embed_perturbation(const ImageU8& adv, const StageMatrix& stages, const std::string& key,
                           StegoMode mode) {
    if (adv.h != stages.h || adv.w != stages.w)
        throw ShapeError("embed: stage matrix " + std::to_string(stages.h) + "x" +
                         std::to_string(stages.w) + " does not match image " +
                         std::to_string(adv.h) + "x" + std::to_string(adv.w));
    const std::vector<std::uint8_t> payload = build_payload(stages, key, mode);
    const std::vector<bool> bits = bits_from_bytes(payload);
    return mode == StegoMode::Lsb ? lsb_embed(adv, bits) : hs_embed(adv, bits);
}

namespace {

// Restores x = adv - stage*xi, saturating; lsb-mode LSB damage keeps each
// channel within +-1 of the true original.
ImageU8 remove_stages(const ImageU8& adv, const StageMatrix& stages) {
    ImageU8 out = adv;
    for (int i = 0; i < adv.h; ++i) {
        for (int j = 0; j < adv.w; ++j) {
            const int d = static_cast<int>(stages.at(i, j)) * stages.xi;
            for (int ch = 0; ch < adv.c; ++ch) {
                const int v = static_cast<int>(adv.at(i, j, ch)) - d;
                out.at(i, j, ch) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
            }
        }
    }
    return out;
}

}  // namespace

Recovered recover_image(const ImageU8& stego, const std::string& key,
                        std::optional<StegoMode> expect_mode) {
    if (stego.numel() < 16) throw FormatError("recover: image too small to hold a payload");

    // Sniff the container: lsb payloads start with the clear "DPTR" magic,
    // hs containers with the clear "HS" metadata magic.
    const std::vector<std::uint8_t> head =
        bytes_from_bits(lsb_extract(stego, 16));
    Recovered rec;
    if (head[0] == 'D' && head[1] == 'P') {
        const auto hdr_bits = lsb_extract(stego, kPayloadHeaderBytes * 8);
        std::vector<std::uint8_t> hdr = bytes_from_bits(hdr_bits);
        if (std::memcmp(hdr.data(), kPayloadMagic, 4) != 0)
            throw FormatError("recover: bad payload magic");
        if (hdr[4] != kPayloadVersion)
            throw FormatError("recover: unsupported payload version");
        std::vector<std::uint8_t> enc(hdr.begin() + 5, hdr.end());
        keystream_xor(enc, key);
        const std::uint32_t bit_count = get_u32(&enc[8]);
        const std::size_t total_bytes = kPayloadHeaderBytes + (bit_count + 7) / 8 + 4;
        if (total_bytes * 8 > stego.numel())
            throw IntegrityError("recover: declared payload exceeds image capacity "
                                 "(wrong key or corrupted)");
        const std::vector<std::uint8_t> payload =
            bytes_from_bits(lsb_extract(stego, total_bytes * 8));
        rec.mode = StegoMode::Lsb;
        rec.stages = parse_payload(payload, key, &rec.mode);
        if (rec.mode != StegoMode::Lsb)
            throw FormatError("recover: payload declares hs mode inside an lsb container");
        rec.adv = stego;
        rec.restored = remove_stages(stego, rec.stages);
    } else if (head[0] == 'H' && head[1] == 'S') {
        HsExtracted ex = hs_extract(stego);
        if (ex.bits.size() % 8 != 0) throw FormatError("recover: hs payload not byte aligned");
        const std::vector<std::uint8_t> payload = bytes_from_bits(ex.bits);
        rec.mode = StegoMode::Hs;
        rec.stages = parse_payload(payload, key, &rec.mode);
        if (rec.mode != StegoMode::Hs)
            throw FormatError("recover: payload declares lsb mode inside an hs container");
        rec.adv = std::move(ex.carrier);
        rec.restored = remove_stages(rec.adv, rec.stages);
    } else {
        throw FormatError("recover: no payload magic found in the LSB plane");
    }
    if (rec.stages.h != stego.h || rec.stages.w != stego.w)
        throw FormatError("recover: payload stage dimensions do not match the image");
    if (expect_mode && rec.mode != *expect_mode)
        throw FormatError("recover: container mode does not match the requested mode");
    return rec;
}

}  // namespace revadv
