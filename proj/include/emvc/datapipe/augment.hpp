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

#ifndef EMVC__DATAPIPE__AUGMENT_HPP_
#define EMVC__DATAPIPE__AUGMENT_HPP_

#include <random>

#include "emvc/datapipe/image.hpp"

namespace emvc::datapipe
{

struct AugmentOptions
{
  double flip_probability = 0.5;
  double max_rotation_deg = 2.0;
};

struct Augmentation
{
  bool flip = false;
  double rotation_deg = 0.0;
};

// Draws flip then rotation, always consuming the same number of variates.
Augmentation draw_augmentation(std::mt19937_64 & rng, const AugmentOptions & options = {});

// Flip mirrors the image and negates the steering; rotation leaves it as is.
void apply_augmentation(const Augmentation & a, Image & image, double & steering_deg);

}  // namespace emvc::datapipe

#endif  // EMVC__DATAPIPE__AUGMENT_HPP_
