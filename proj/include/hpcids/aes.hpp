#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace hpcids::aes {

using Block = std::array<std::uint8_t, 16>;
using Key = std::array<std::uint8_t, 16>;

inline constexpr int kRounds = 10;

namespace detail {

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1B : 0x00));
}

constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

constexpr std::array<std::uint8_t, 256> make_sbox() {
  std::array<std::uint8_t, 256> box{};
  for (int v = 0; v < 256; ++v) {
    // Multiplicative inverse in GF(2^8) is x^254.
    std::uint8_t inv = 0;
    if (v != 0) {
      std::uint8_t acc = 1;
      std::uint8_t base = static_cast<std::uint8_t>(v);
      for (int e = 254; e; e >>= 1) {
        if (e & 1) acc = gf_mul(acc, base);
        base = gf_mul(base, base);
      }
      inv = acc;
    }
    std::uint8_t s = inv;
    for (int r = 1; r <= 4; ++r) s ^= static_cast<std::uint8_t>((inv << r) | (inv >> (8 - r)));
    box[v] = static_cast<std::uint8_t>(s ^ 0x63);
  }
  return box;
}

}  // namespace detail

inline constexpr std::array<std::uint8_t, 256> kSbox = detail::make_sbox();

// Expanded AES-128 key schedule (FIPS-197 section 5.2).
class AesState {
 public:
  explicit AesState(const Key& key);

  const Key& key() const { return key_; }
  const std::array<std::uint8_t, 16 * (kRounds + 1)>& round_keys() const { return round_keys_; }
  std::uint8_t round_key(int round, int i) const { return round_keys_[16 * round + i]; }

 private:
  Key key_;
  std::array<std::uint8_t, 16 * (kRounds + 1)> round_keys_{};
};

// Which step of the cipher is about to run; the emulator charges a code
// footprint per step.
enum class Step : std::uint8_t { AddRoundKey, SubBytes, ShiftRows, MixColumns };

// A probe observes every table and state access the cipher makes. The plain
// encrypt() uses a no-op probe; the ECU emulator plugs in its cache model.
struct NullProbe {
  void step(Step) {}
  void state_load(int) {}
  void state_store(int) {}
  void sbox_load(std::uint8_t) {}
  void round_key_load(int /*round*/, int /*index*/) {}
};

template <typename Probe>
Block encrypt_traced(const AesState& aes, const Block& in, Probe& probe) {
  Block s = in;

  auto add_round_key = [&](int round) {
    probe.step(Step::AddRoundKey);
    for (int i = 0; i < 16; ++i) {
      probe.state_load(i);
      probe.round_key_load(round, i);
      s[i] ^= aes.round_key(round, i);
      probe.state_store(i);
    }
  };
  auto sub_bytes = [&] {
    probe.step(Step::SubBytes);
    for (int i = 0; i < 16; ++i) {
      probe.state_load(i);
      probe.sbox_load(s[i]);
      s[i] = kSbox[s[i]];
      probe.state_store(i);
    }
  };
  // State is column-major: byte (row r, column c) lives at 4c + r.
  auto shift_rows = [&] {
    probe.step(Step::ShiftRows);
    Block t;
    for (int i = 0; i < 16; ++i) {
      probe.state_load(i);
      t[i] = s[i];
    }
    for (int c = 0; c < 4; ++c) {
      for (int r = 0; r < 4; ++r) {
        s[4 * c + r] = t[4 * ((c + r) % 4) + r];
        probe.state_store(4 * c + r);
      }
    }
  };
  auto mix_columns = [&] {
    probe.step(Step::MixColumns);
    for (int c = 0; c < 4; ++c) {
      std::uint8_t a[4];
      for (int r = 0; r < 4; ++r) {
        probe.state_load(4 * c + r);
        a[r] = s[4 * c + r];
      }
      for (int r = 0; r < 4; ++r) {
        s[4 * c + r] = static_cast<std::uint8_t>(detail::xtime(a[r]) ^ detail::xtime(a[(r + 1) % 4]) ^
                                                 a[(r + 1) % 4] ^ a[(r + 2) % 4] ^ a[(r + 3) % 4]);
        probe.state_store(4 * c + r);
      }
    }
  };

  add_round_key(0);
  for (int round = 1; round < kRounds; ++round) {
    sub_bytes();
    shift_rows();
    mix_columns();
    add_round_key(round);
  }
  sub_bytes();
  shift_rows();
  add_round_key(kRounds);
  return s;
}

inline Block encrypt(const AesState& aes, const Block& in) {
  NullProbe probe;
  return encrypt_traced(aes, in, probe);
}

}  // namespace hpcids::aes
