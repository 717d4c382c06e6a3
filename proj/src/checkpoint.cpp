// Copyright 2026  The hwcls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hwcls/checkpoint.hpp"

#include <bit>
#include <cstring>

namespace hwcls {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

void put_u64(std::string& out, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

void put_values(std::string& out, const Tensord& t) {
  out.append(reinterpret_cast<const char*>(t.data()), static_cast<std::size_t>(t.size()) * sizeof(double));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n)
      throw ParseError(pos_, std::string("checkpoint truncated in ") + what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t u64(const char* what) {
    std::uint64_t v;
    std::memcpy(&v, take(8, what).data(), 8);
    return v;
  }
  void values(Tensord& t, const char* what) {
    const auto n = static_cast<std::size_t>(t.size()) * sizeof(double);
    std::memcpy(t.data(), take(n, what).data(), n);
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  check_parameters(ckpt.model, ckpt.params);
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [name, t] : ckpt.params) table.push_back({{"name", name}, {"shape", t.shape()}});
  nlohmann::json classes = nlohmann::json::array();
  for (LabelClass c : ckpt.classes) classes.push_back(label_name(c));
  nlohmann::json header = {{"version", kCheckpointVersion},
                           {"model", model_config_to_json(ckpt.model)},
                           {"preprocess", preprocess_config_to_json(ckpt.preprocess)},
                           {"classes", classes},
                           {"parameters", table},
                           {"epoch", ckpt.epoch},
                           {"seed", ckpt.seed},
                           {"training", ckpt.training}};
  header["optimizer"] = ckpt.optimizer ? nlohmann::json({{"t", ckpt.optimizer->t}}) : nlohmann::json(nullptr);

  const std::string text = header.dump();
  std::string out(kCheckpointMagic);
  put_u64(out, text.size());
  out += text;
  for (const auto& [name, t] : ckpt.params) put_values(out, t);
  if (ckpt.optimizer) {
    for (const auto* moments : {&ckpt.optimizer->m, &ckpt.optimizer->v})
      for (const auto& [name, t] : ckpt.params) {
        auto it = moments->find(name);
        put_values(out, it != moments->end() ? it->second : Tensord(t.shape()));
      }
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(kCheckpointMagic.size(), "magic") != kCheckpointMagic)
    throw ParseError(0, "not a checkpoint (bad magic)");
  const std::uint64_t len = r.u64("header length");
  const std::size_t header_pos = r.pos();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.take(len, "header"));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(header_pos + (e.byte > 0 ? e.byte - 1 : 0), "invalid checkpoint header");
  }
  Checkpoint ckpt;
  try {
    if (header.at("version").get<int>() != kCheckpointVersion)
      throw ParseError(header_pos, "unsupported checkpoint version " + header.at("version").dump());
    ckpt.model = model_config_from_json(header.at("model"));
    ckpt.preprocess = preprocess_config_from_json(header.at("preprocess"));
    for (const auto& c : header.at("classes")) ckpt.classes.push_back(label_from_name(c.get<std::string>()));
    ckpt.epoch = header.at("epoch").get<int>();
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.training = header.value("training", nlohmann::json::object());
    for (const auto& entry : header.at("parameters"))
      ckpt.params.emplace(entry.at("name").get<std::string>(), Tensord(entry.at("shape").get<Shape>()));
    if (!header.at("optimizer").is_null()) {
      ckpt.optimizer.emplace();
      ckpt.optimizer->t = header.at("optimizer").at("t").get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(header_pos, std::string("malformed checkpoint header: ") + e.what());
  }
  check_parameters(ckpt.model, ckpt.params);
  for (auto& [name, t] : ckpt.params) r.values(t, "parameters");
  if (ckpt.optimizer) {
    for (auto* moments : {&ckpt.optimizer->m, &ckpt.optimizer->v})
      for (const auto& [name, t] : ckpt.params) {
        Tensord m(t.shape());
        r.values(m, "optimizer state");
        moments->emplace(name, std::move(m));
      }
  }
  if (!r.done()) throw ParseError(r.pos(), "trailing bytes after checkpoint");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace hwcls
