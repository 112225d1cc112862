// Copyright 2026 The emvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emvc/models/checkpoint.hpp"

#include <limits>
#include <set>

#include "emvc/common/binary_io.hpp"
#include "emvc/common/error.hpp"

namespace emvc::models
{

namespace
{

constexpr std::string_view kMagic = "EMVC";

ModelConfig read_header(ByteReader & in)
{
  if (in.remaining() < kMagic.size() || in.get_bytes(kMagic.size()) != kMagic)
    throw FormatError("checkpoint: bad magic");
  const std::uint32_t version = in.get_u32();
  if (version != kCheckpointVersion)
    throw FormatError(
      "checkpoint: unsupported version " + std::to_string(version) + " (expected " +
      std::to_string(kCheckpointVersion) + ")");
  const std::string text = in.get_string();
  try {
    return ModelConfig::from_text(KeyValueText::parse(text));
  } catch (const ConfigError & e) {
    throw FormatError(std::string("checkpoint: invalid embedded config: ") + e.what());
  }
}

}  // namespace

template <typename Real>
std::string save_checkpoint(const DrivingModel<Real> & model)
{
  ByteWriter out;
  out.put_bytes(kMagic);
  out.put_u32(kCheckpointVersion);
  out.put_string(model.config().to_text().serialize());
  out.put_u32(static_cast<std::uint32_t>(model.parameters().size()));
  for (const auto & e : model.parameters()) {
    out.put_string(e.name);
    out.put_u32(static_cast<std::uint32_t>(e.tensor.rank()));
    for (auto d : e.tensor.dims()) out.put_u32(static_cast<std::uint32_t>(d));
    for (auto v : e.tensor.data()) out.put_f32(static_cast<float>(v));
  }
  return out.take();
}

ModelConfig read_checkpoint_config(std::string_view bytes)
{
  ByteReader in(bytes);
  return read_header(in);
}

template <typename Real>
LoadedModel<Real> load_checkpoint(std::string_view bytes, const ModelConfig * expected)
{
  ByteReader in(bytes);
  ModelConfig config = read_header(in);
  std::vector<std::string> warnings;
  if (expected != nullptr) {
    if (!config.same_architecture(*expected)) {
      std::string keys;
      for (const auto & k : config.differing_keys(*expected)) keys += " " + k;
      throw ConfigError("checkpoint architecture does not match the requested config:" + keys);
    }
    for (const auto & k : config.differing_keys(*expected)) {
      const auto ours = expected->to_text().get(k);
      const auto theirs = config.to_text().get(k);
      warnings.push_back(
        "config override: " + k + " = " + ours + " (checkpoint has " + theirs + ")");
    }
  }

  DrivingModel<Real> model(config, 0);
  if (expected != nullptr) model.set_loss_settings(*expected);
  auto & params = model.parameters();

  const std::uint32_t count = in.get_u32();
  std::set<std::string> seen;
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::string name = in.get_string();
    if (!params.contains(name)) throw FormatError("checkpoint: unexpected tensor `" + name + "`");
    if (!seen.insert(name).second) throw FormatError("checkpoint: duplicate tensor `" + name + "`");
    auto & tensor = params.at(name);
    const std::uint32_t rank = in.get_u32();
    autodiff::Shape dims(rank);
    for (auto & d : dims) d = in.get_u32();
    if (dims != tensor.dims())
      throw FormatError(
        "checkpoint: tensor `" + name + "` has dims " + autodiff::shape_string(dims) +
        ", model expects " + autodiff::shape_string(tensor.dims()));
    for (auto & v : tensor.data()) v = static_cast<Real>(in.get_f32());
  }
  if (seen.size() != params.size()) {
    for (const auto & e : params)
      if (!seen.count(e.name)) throw FormatError("checkpoint: missing tensor `" + e.name + "`");
  }
  if (!in.at_end())
    throw FormatError("checkpoint: " + std::to_string(in.remaining()) + " trailing bytes");
  return LoadedModel<Real>{std::move(model), std::move(warnings)};
}

template std::string save_checkpoint<float>(const DrivingModel<float> &);
template std::string save_checkpoint<double>(const DrivingModel<double> &);
template LoadedModel<float> load_checkpoint<float>(std::string_view, const ModelConfig *);
template LoadedModel<double> load_checkpoint<double>(std::string_view, const ModelConfig *);

}  // namespace emvc::models
