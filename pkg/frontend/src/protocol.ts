// Message shapes of the gazekit session service (JSON over WebSocket).
// The studio never decides anything locally: recognition, key selection,
// epoch matching, and pointer-action classification all arrive as events.

export interface HelloOk {
  type: "hello_ok";
  version: number;
  capabilities: string[];
}

export interface TrajectoryParams {
  shape_id: string;
  kind: "circle-orbit" | "linear-bounce" | "lissajous";
  cx: number;
  cy: number;
  amp_x: number;
  amp_y: number;
  omega: number;
  phase: number;
  ratio_x: number;
  ratio_y: number;
}

export interface KeyGeometry {
  key_id: string;
  label: string;
  output: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface SessionStarted {
  type: "session_started";
  session_id: string;
  mode: "arbiter" | "gesture" | "typing" | "auth";
  // auth
  trajectories?: TrajectoryParams[];
  epoch_ms?: number;
  inter_epoch_ms?: number;
  password_length?: number;
  nominal_duration_ms?: number;
  screen_w?: number;
  screen_h?: number;
  // typing
  keys?: KeyGeometry[];
  target_phrase?: string;
  // gesture
  template_names?: string[];
  n?: number;
  reject_threshold?: number;
}

export interface PointerActionEvent {
  type: "pointer_action";
  session_id: string;
  kind: "click" | "double_click" | "hold_start" | "hold_end";
  x: number;
  y: number;
  t_ms: number;
  target: string | null;
}

export interface GestureResultEvent {
  type: "gesture_result";
  session_id: string;
  index: number;
  t_ms: number;
  match: { name: string; action_id: string; score: number; distance: number } | null;
  error: string | null;
}

export interface GestureTrainedEvent {
  type: "gesture_trained";
  session_id: string;
  name: string;
  action_id?: string;
  ok: boolean;
  error?: string;
}

export interface KeySelectedEvent {
  type: "key_selected";
  session_id: string;
  t_ms: number;
  key_id: string | null;
  transcribed: string;
}

export interface EpochResultEvent {
  type: "epoch_result";
  session_id: string;
  index: number;
  winner: string;
  distances: Record<string, number>;
  matched: boolean;
}

export interface DebugPositionOk {
  type: "debug_position_ok";
  session_id: string;
  shape_id: string;
  t_ms: number;
  x: number;
  y: number;
}

export interface SessionEnded {
  type: "session_ended";
  session_id: string;
  mode: string;
  outcome?: "Accept" | "Reject" | "Abort";
  wall_ms?: number;
  epochs?: EpochResultEvent[];
  metrics?: { wpm: number; kspc: number | null; rba: number } | null;
  transcribed?: string;
  actions?: PointerActionEvent[];
  results?: GestureResultEvent[];
}

export interface ErrorEvent {
  type: "error";
  code: string;
  detail: string;
}

export type ServiceEvent =
  | HelloOk
  | SessionStarted
  | PointerActionEvent
  | GestureResultEvent
  | GestureTrainedEvent
  | KeySelectedEvent
  | EpochResultEvent
  | DebugPositionOk
  | SessionEnded
  | ErrorEvent
  | { type: "store_ok"; session_id: string; [key: string]: unknown }
  | { type: "train_armed"; session_id: string; name: string };

export interface SampleMessage {
  type: "sample";
  session_id: string;
  t_ms: number;
  x: number;
  y: number;
  valid: boolean;
}

export interface TriggerMessage {
  type: "trigger";
  session_id: string;
  t_ms: number;
  kind: "press" | "release";
}
