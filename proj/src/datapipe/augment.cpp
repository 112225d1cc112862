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

#include "emvc/datapipe/augment.hpp"

namespace emvc::datapipe
{

Augmentation draw_augmentation(std::mt19937_64 & rng, const AugmentOptions & options)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Augmentation a;
  const double u_flip = unit(rng);
  const double u_rot = unit(rng);
  a.flip = u_flip < options.flip_probability;
  a.rotation_deg = (2.0 * u_rot - 1.0) * options.max_rotation_deg;
  return a;
}

void apply_augmentation(const Augmentation & a, Image & image, double & steering_deg)
{
  if (a.flip) {
    image = flip_horizontal(image);
    steering_deg = -steering_deg;
  }
  if (a.rotation_deg != 0.0) image = rotate(image, a.rotation_deg);
}

}  // namespace emvc::datapipe
