export * from "./protocol";
export * from "./client";
export * from "./captionView";
export * from "./viewState";
export * from "./meetingView";
export * from "./gamePanel";
export * from "./textInput";
export * from "./roomForm";
