#include "flowsr/dsp/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "flowsr/util/error.hpp"

namespace flowsr::dsp {

namespace {

// All file formats here are little-endian; these helpers keep the layout
// explicit instead of relying on host byte order.
void put_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}
void put_u32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}
void put_f32(std::vector<uint8_t>& b, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  put_u32(b, u);
}

struct Reader {
  const uint8_t* p;
  size_t n;
  size_t pos = 0;
  std::string path;

  void need(size_t k) const {
    if (pos + k > n) throw DataError("truncated file: " + path);
  }
  uint16_t u16() {
    need(2);
    uint16_t v = p[pos] | (p[pos + 1] << 8);
    pos += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  float f32() {
    uint32_t u = u32();
    float v;
    std::memcpy(&v, &u, 4);
    return v;
  }
  std::string tag() {
    need(4);
    std::string s(reinterpret_cast<const char*>(p + pos), 4);
    pos += 4;
    return s;
  }
  void skip(size_t k) {
    need(k);
    pos += k;
  }
};

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff len = in.tellg();
  in.seekg(0);
  std::vector<uint8_t> buf(static_cast<size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(buf.data()), len);
  if (!in) throw DataError("failed reading file: " + path);
  return buf;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing file: " + path);
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  const auto bytes = read_file(path);
  Reader r{bytes.data(), bytes.size(), 0, path};
  if (r.tag() != "RIFF") throw DataError("not a RIFF file: " + path);
  r.u32();  // riff size
  if (r.tag() != "WAVE") throw DataError("not a WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  AudioBuffer audio;
  while (r.pos + 8 <= r.n) {
    const std::string id = r.tag();
    const uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw DataError("malformed fmt chunk: " + path);
      const size_t end = r.pos + size;
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      bits = r.u16();
      if (format == 0xfffe && size >= 40) {  // WAVE_FORMAT_EXTENSIBLE
        r.u16();                             // cbSize
        r.u16();                             // valid bits
        r.u32();                             // channel mask
        format = r.u16();                    // first two bytes of the subformat GUID
        r.skip(14);
      }
      r.pos = end + (size & 1);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DataError("data chunk before fmt chunk: " + path);
      if (channels != 1) {
        throw DataError("only mono WAV is supported (" + std::to_string(channels) +
                        " channels): " + path);
      }
      size_t count = 0;
      if (format == 1 && bits == 16) {
        count = size / 2;
        audio.samples.resize(count);
        for (size_t i = 0; i < count; ++i) {
          audio.samples[i] = static_cast<int16_t>(r.u16()) / 32768.0;
        }
      } else if (format == 3 && bits == 32) {
        count = size / 4;
        audio.samples.resize(count);
        for (size_t i = 0; i < count; ++i) audio.samples[i] = r.f32();
      } else {
        throw DataError("unsupported WAV sample format (need 16-bit PCM or 32-bit float): " +
                        path);
      }
      audio.sample_rate = static_cast<int>(rate);
      return audio;
    } else {
      r.skip(size + (size & 1));
    }
  }
  throw DataError("no data chunk found in WAV file: " + path);
}

void write_wav(const std::string& path, const AudioBuffer& audio, WavSampleFormat fmt) {
  if (audio.sample_rate <= 0) throw DataError("cannot write WAV with sample_rate <= 0");
  const uint32_t n = static_cast<uint32_t>(audio.samples.size());
  const bool pcm = fmt == WavSampleFormat::kPcm16;
  const uint16_t bits = pcm ? 16 : 32;
  const uint32_t data_size = n * (bits / 8);

  std::vector<uint8_t> b;
  b.reserve(44 + data_size);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  put_u32(b, 36 + data_size);
  b.insert(b.end(), {'W', 'A', 'V', 'E'});
  b.insert(b.end(), {'f', 'm', 't', ' '});
  put_u32(b, 16);
  put_u16(b, pcm ? 1 : 3);
  put_u16(b, 1);  // mono
  put_u32(b, static_cast<uint32_t>(audio.sample_rate));
  put_u32(b, static_cast<uint32_t>(audio.sample_rate) * (bits / 8));
  put_u16(b, bits / 8);
  put_u16(b, bits);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  put_u32(b, data_size);
  if (pcm) {
    for (uint32_t i = 0; i < n; ++i) {
      const double x = std::clamp(audio.samples[i], -1.0, 1.0);
      const int v = static_cast<int>(std::lrint(x * 32767.0));
      put_u16(b, static_cast<uint16_t>(static_cast<int16_t>(v)));
    }
  } else {
    for (uint32_t i = 0; i < n; ++i) put_f32(b, static_cast<float>(audio.samples[i]));
  }
  write_file(path, b);
}

void write_spectrogram(const std::string& path, const ComplexSpectrogram& spec) {
  std::vector<uint8_t> b;
  b.insert(b.end(), {'C', 'S', 'P', 'C'});
  put_u32(b, 1);  // version
  put_u32(b, static_cast<uint32_t>(spec.bins));
  put_u32(b, static_cast<uint32_t>(spec.frames));
  for (const auto& c : spec.data) {
    put_f32(b, static_cast<float>(c.real()));
    put_f32(b, static_cast<float>(c.imag()));
  }
  write_file(path, b);
}

ComplexSpectrogram read_spectrogram(const std::string& path) {
  const auto bytes = read_file(path);
  Reader r{bytes.data(), bytes.size(), 0, path};
  if (r.tag() != "CSPC") throw DataError("not a spectrogram file: " + path);
  const uint32_t version = r.u32();
  if (version != 1) {
    throw DataError("unsupported spectrogram version " + std::to_string(version) + ": " + path);
  }
  const uint32_t f = r.u32();
  const uint32_t l = r.u32();
  ComplexSpectrogram spec(static_cast<int>(f), static_cast<int>(l));
  for (auto& c : spec.data) {
    const double re = r.f32();
    const double im = r.f32();
    c = {re, im};
  }
  return spec;
}

}  // namespace flowsr::dsp
