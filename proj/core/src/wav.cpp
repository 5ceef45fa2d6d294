// Copyright 2026 The binmwf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "binmwf/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "binmwf/error.hpp"

namespace binmwf {
namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const char* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* chunk = bytes.data() + pos;
    const auto size = load<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Truncated final chunk; accept what is present for data.
      if (std::memcmp(chunk, "data", 4) == 0) {
        data = bytes.data() + body;
        data_size = bytes.size() - body;
      }
      break;
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw IoError("malformed fmt chunk: " + path.string());
      format = load<std::uint16_t>(chunk + 8);
      channels = load<std::uint16_t>(chunk + 10);
      rate = load<std::uint32_t>(chunk + 12);
      bits = load<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible && size >= 40) {
        format = load<std::uint16_t>(chunk + 32);  // first two bytes of the subformat GUID
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1U);
  }

  if (channels == 0 || data == nullptr) throw IoError("missing fmt or data chunk: " + path.string());
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw IoError("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                  std::to_string(bits) + " bits): " + path.string());
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = data_size / (bytes_per_sample * channels);
  WavData wav;
  wav.sample_rate = static_cast<double>(rate);
  wav.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const char* p = data + (i * channels + c) * bytes_per_sample;
      wav.channels[c][i] = pcm16 ? load<std::int16_t>(p) / 32768.0 : static_cast<double>(load<float>(p));
    }
  }
  return wav;
}

WavData read_wav(const std::filesystem::path& path, double expected_rate) {
  WavData wav = read_wav(path);
  if (wav.sample_rate != expected_rate) {
    throw InvalidInput("sample rate of " + path.string() + " is " +
                       std::to_string(static_cast<long>(wav.sample_rate)) + " Hz, expected " +
                       std::to_string(static_cast<long>(expected_rate)) + " Hz");
  }
  return wav;
}

void write_wav(const std::filesystem::path& path, const WavData& wav, SampleFormat format) {
  if (wav.channels.empty()) throw InvalidInput("write_wav: no channels");
  const std::size_t frames = wav.frames();
  for (const auto& ch : wav.channels) {
    if (ch.size() != frames) throw InvalidInput("write_wav: channel lengths differ");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write WAV file: " + path.string());

  const auto channels = static_cast<std::uint16_t>(wav.channels.size());
  const std::uint16_t bits = format == SampleFormat::kPcm16 ? 16 : 32;
  const std::uint32_t block = channels * (bits / 8U);
  const auto data_size = static_cast<std::uint32_t>(frames * block);
  const auto rate = static_cast<std::uint32_t>(std::lround(wav.sample_rate));

  out.write("RIFF", 4);
  put<std::uint32_t>(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, format == SampleFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  put<std::uint16_t>(out, channels);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * block);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(block));
  put<std::uint16_t>(out, bits);
  out.write("data", 4);
  put<std::uint32_t>(out, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& ch : wav.channels) {
      if (format == SampleFormat::kPcm16) {
        const double s = std::clamp(ch[i], -1.0, 32767.0 / 32768.0);
        put<std::int16_t>(out, static_cast<std::int16_t>(std::lround(s * 32768.0)));
      } else {
        put<float>(out, static_cast<float>(ch[i]));
      }
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace binmwf
