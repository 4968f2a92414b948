// Builtin copies of the prompt template files under prompts/.
// Generated from those files; a unit test guards against divergence.

#include "steerbench/prompts.hpp"

namespace steerbench {
namespace detail {

const char* const k_simlingo_refine_template =
    R"TPL(You are an expert in vehicle dynamics and driving behavior analysis. Your task is to interpret and refine natural language descriptions of driving behavior by analyzing vehicle ego state data (speed and course over time) to produce a **precise and nuanced behavior summary**. Your output should describe:

1. **Ego State Analysis** - a brief explanation of observed speed and course trends over time.
2. **Refined Driving Behavior Description** - a more specific version of the original description, enhanced with a meaningful modifier _(e.g., **smooth turning**, **wide turn**, **abrupt stop**, **steady lane keeping**)_ and a **driving style**, reflecting the driver's attitude or intent _(e.g., **cautiously**, **normally**, **aggressively**)_

---

## Input Format

**Driving Description:** 
{commentary}

**Ego Vehicle State Sequence** (next 3 seconds from frame {frame_number}):
{ego_states_sequence}

These ego states reflect how the vehicle moved during the described behavior.

> **Note:**  
> - **Course increasing** -> vehicle is adjusting **right**  
> - **Course decreasing** -> vehicle is adjusting **left**

---

## Output Guidelines

Your response should contain two sections:

### 1. Ego State Analysis

Analyze the speed and course sequence:
- Describe speed patterns: Is the vehicle accelerating, decelerating, or maintaining speed?
- Describe course patterns: Is the vehicle turning sharply, smoothly, or going straight?
- Mention time duration and total changes in course or speed.

### 2. Refined Driving Behavior Description

Produce a single, natural-language sentence that:
- Refines the driving description with motion extent (e.g., *smooth*, *sharp*, *wide*, *slight*)
- Adds driving style (e.g., *cautiously*, *normally*, *aggressively*)
- Grounds the refinement in the observable patterns of the ego vehicle states
- Do not change the semantic meaning of the original description. Only use the ego states to refine the description.

---

## Notes

- The refined description must not exceed **20 words**.
- Use **speed trends** to judge acceleration or deceleration patterns.
- Use **course change patterns** to assess turning sharpness or trajectory smoothness.
- If the style cannot be confidently inferred, default to **"normally"**.
- Use **natural, human-readable language**-avoid unnecessary technical jargon.
- The refined description must be a single sentence in present tense and third person (i.e. "The vehicle turns..." or "The car accelerates...")
- If the driving description includes any references to external vehicles, pedestrians or traffic constructs, maintain this information in the final refined description, as well as their distances from the ego vehicle and any descriptiors (i.e. color) if available.
- Do not change the semantic meaning of the original description. Only use the ego states to refine the description.
- If the original description mentions specific maneuvers, i.e. lane changes, retain this information. 
- Unless a turn is explicitly mentioned in the original description, heading changes of 30 degrees or below should be described as **adjustments** to the left or right, and not turns.
)TPL";

const char* const k_baseline_nuscenes_template =
    R"TPL(You are an expert in vehicle dynamics and driving behavior analysis. You have been provided two frames from a dashcam video from a vehicle, with a projected green, yellow, and red trajectory overlaid on the first and middle frames of the video of the trajectory that the vehicle is in the process of taking. The images are labelled "First Frame" and "Middle Frame" at the tops of the images. 

Describe:

1. Ego State Analysis:

Analyze the speed and course sequence:
- Describe speed patterns: Is the vehicle accelerating, decelerating, or maintaining speed?
- Describe course patterns: Is the vehicle turning sharply, smoothly, or going straight?
- Mention time duration and total changes in course or speed.

These ego states reflect how the vehicle moved during the described behavior.

> **Note:**  
> - **Course increasing** -> vehicle is moving **right**  
> - **Course decreasing** -> vehicle is moving **left**

{ego_states_text}

2. First frame description: 
- Describe the lane markings in the first frame image, and the projected trajectory's position relative to them at the beginning of the trajectory and at the end. Identify any areas on the road with solid white or yellow lines.
- Are there road markings, signs, or other structures that indicate that the vehicle is at an intersection? 
- Which lane does the trajectory begin in, and which lane does the trajectory end in? 
- Is the red, yellow, and/or green trajectory to the right or left of the lane markings?
- Is the cyan circle to the right or left of the lane markings?
- Is the trajectory curving? If so, which way is the trajectory curving?

3. Middle frame description: 
- Describe the lane markings in the middle frame image, and the projected trajectory's position relative to them at the beginning of the trajectory and at the end. Identify any areas on the road with solid white or yellow lines.
- Are there road markings, signs, or other structures that indicate that the vehicle is at an intersection? 
- Which lane does the trajectory begin in, and which lane does the trajectory end in? 
- Is the red, yellow, and/or green trajectory to the right or left of the lane markings?
- Is the cyan circle to the right or left of the lane markings?
- Is the trajectory curving? If so, which way is the trajectory curving?

4. Consolidated Analysis: 
- Based on your analysis of the first frame image and the middle frame image, which lane does the vehicle begin in, and which lane does it end in? 
- Does this signify a lane change? If so, is the vehicle making a lane change to the left, or a lane change to the right? 
- Alternatively, is the vehicle at an intersection in either frame? Does this signify a turn? Even if the trajectory is curving, consider whether the course change is large enough to be a turn, and whether the vehicle is simply continuing forward to a parallel road.
- If so, is the vehicle turning to the left, or to the right?

5. Vehicle Action: The action that the vehicle is taking. Is the vehicle **turning**, **changing lanes**, or **continuing straight**? If the vehicle is turning or changing lanes, is it doing so to the **left** or to the **right**? Choose from one of the following discrete actions:
- turning left
- turning right
- changing lanes left
- changing lanes right
- continuing straight
- completely stationary
- making a U-Turn

Notes:
- The cyan circle denotes the **end** of the trajectory.
- The trajectory begins at the **bottom** of the image.
- A turn is defined as a full turn at an intersection.
- Otherwise, if the trajectory is simply following a curve in the road, describe this as **continuing straight**
- If the trajectory is **continuing straight** through an intersection, describe this as **continuing straight**
- If the vehicle has crossed a lane marking, it is most likely making a lane change.
- There may be no visible trajectory projected, in which case the vehicle is most likely moving very slowly or stationary.
- Identify only the lane markings that are clearly discernible.
- Small course changes of fewer than 4 degrees most likely indicate that the vehicle is **continuing forward**.
- Large course changes over 50 degrees likely indicate that the vehicle is **turning**. 
- Small velocities below 1.0 meters per second likely indicate that the vehicle is stationary.

Lane information: {lane_information}
)TPL";

const char* const k_stage2_refine_template =
    R"TPL(# Driving Behavior Refinement Prompt

You are an expert in vehicle dynamics and driving behavior analysis. Your task is to interpret and refine natural language descriptions of driving behavior by analyzing vehicle ego state data (speed and course over time) to produce a **precise and nuanced behavior summary**. Your output should describe:

1. **Ego State Analysis** -> a brief explanation of observed speed and course trends over time.
2. **Refined Driving Behavior Description** - a more specific version of the original description, enhanced with a meaningful modifier _(e.g., **smooth turning**, **wide turn**, **abrupt stop**, **steady lane keeping**)_ and a **driving style**, reflecting the driver's attitude or intent _(e.g., **cautiously**, **normally**, **aggressively**)_

---

## Input Format

**Driving Description:**  
{driving_description}

**Ego Vehicle States:**  
{ego_state_sequence}

These ego states reflect how the vehicle moved during the described behavior.

> **Note:**  
> - **Course increasing** -> vehicle is moving **right**  
> - **Course decreasing** -> vehicle is moving **left**

---

## Output Guidelines

Your response should contain two sections:

### 1. Ego State Analysis

Analyze the speed and course sequence:
- Describe speed patterns: Is the vehicle accelerating, decelerating, or maintaining speed?
- Describe course patterns: Is the vehicle turning sharply, smoothly, or going straight?
- Mention time duration and total changes in course or speed.

### 2. Refined Driving Behavior Description

Produce a single, natural-language sentence that:
- Refines the driving description with motion extent (e.g., *smooth*, *sharp*, *wide*, *slight*)
- Adds driving style (e.g., *cautiously*, *normally*, *aggressively*)
- Grounding the refinement in the observable patterns of the ego vehicle states

---

## Notes

- The refined description must not exceed **20 words**.
- Use **speed trends** to judge acceleration or deceleration patterns.
- Use **course change patterns** to assess turning sharpness or trajectory smoothness.
- If the style cannot be confidently inferred, default to **"normally"**.
- Use **natural, human-readable language**-avoid unnecessary technical jargon.
- If the driving description is "The vehicle is continuing straight", describe any left or right movements as "adjusting left" or "adjusting right" respectively. Do not describe this as turning.
)TPL";

const char* const k_reasoning_template =
    R"TPL(You are an expert in autonomous driving planning. Given a first person dashcam view from a car and the car's future action, describe the following:

Future action: {meta_action}

1. Provide a sentence of justification for the car's future action.
- A concrete example is as follows: There is a car in the oncoming lane and an accident ahead of me, so I should wait within my lane until the oncoming car is clear.

2. Behavior description of critical objects: describe the current status and intent for the 2-3 most important critical objects in the image (e.g. pedestrians, vehicles, cyclists, stop signs, traffic lights, construction cones, etc.) in 3 sentences or fewer. 
- A concrete example is as follows: The pedestrian is currently standing on the sidewalk, looking toward the road, and maybe preparing to cross the street. The vehicle is currently ahead of me, moving in the same direction, and its future trajectory suggests it will continue straight.
)TPL";

const char* const k_zero_shot_plan_template =
    R"TPL(You are an autonomous driving assistant. Your task is to generate a driving behavior plan based on:
A front-view camera image
A sequence of historical ego states taken at 0.5 Hz over the past 6 seconds
The current speed of the vehicle
A routing command.

Inputs:
Image: {image}
Speed history: {speed_history}
Heading history: {heading_history}
Current speed: {current_speed}
Routing command: {routing_command}

Output:

1. Behavior description of critical objects: describe the current movement and appearance of all external agents in the scene, as well as their positioning relative to the ego vehicle. 
Example Output:
"Red car, in one lane to the left, traveling same direction, at 6.1 m/s. Female pedestrian, in crosswalk, travelling opposite direction, at 2.1 m/s."

2. Driving Behavior Plan:
Produce a driving behavior plan (no more than 20 words) that includes:
Speed behavior - Will the vehicle accelerate, maintain speed, or decelerate?
Heading behavior - Describe the expected heading change (e.g., continue straight, turn slightly right, make a sharp left).
Driving style - Reflect the style (e.g., cautiously, smoothly, assertively).
Respond with a single natural language sentence summarizing the driving behavior.
Example Output:
"The car decelerates smoothly and makes a slight right turn, driving normally to follow the blue SUV."

Notes:
- The driving behavior plan must be in present tense and third person (i.e. "The vehicle...")
)TPL";

}  // namespace detail
}  // namespace steerbench
